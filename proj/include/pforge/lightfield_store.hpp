#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pforge/image.hpp"

namespace pforge {

/// Loader failure. kind() tells the caller which precondition broke.
class LightFieldError : public std::runtime_error {
 public:
  enum class Kind { MissingView, DimensionMismatch, DecodeError, IndivisibleAtlas, InvalidLayout };

  LightFieldError(Kind kind, const std::string& what, int row = -1, int col = -1,
                  std::filesystem::path file = {});

  Kind kind() const noexcept { return kind_; }
  int row() const noexcept { return row_; }
  int col() const noexcept { return col_; }
  const std::filesystem::path& file() const noexcept { return file_; }

 private:
  Kind kind_;
  int row_;
  int col_;
  std::filesystem::path file_;
};

/// The m x n grid of sub-aperture views, stored row-major with (0,0) the
/// top-left viewpoint. Immutable once built; safe for concurrent readers.
class LightFieldGrid {
 public:
  /// Validates the grid invariants; throws LightFieldError(DimensionMismatch)
  /// or std::invalid_argument.
  LightFieldGrid(int rows, int cols, std::vector<ViewImage> views, std::string source_id = {});

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  int view_width() const noexcept { return view_width_; }
  int view_height() const noexcept { return view_height_; }
  const std::string& source_id() const noexcept { return source_id_; }
  std::size_t view_count() const noexcept { return views_.size(); }

  /// Throws std::out_of_range for indices outside the grid.
  const ViewImage& view(int row, int col) const;

  /// Re-tiles all views into one atlas image, row-major.
  Image to_atlas() const;

 private:
  int rows_;
  int cols_;
  int view_width_ = 0;
  int view_height_ = 0;
  std::string source_id_;
  std::vector<ViewImage> views_;
};

inline const ViewImage& get_view(const LightFieldGrid& grid, int row, int col) {
  return grid.view(row, col);
}

/// Expands a view filename template. Placeholders are {row}, {col} or
/// {index}, each optionally zero-padded as {index:03}. Templates must use
/// either {row} and {col} together, or {index} alone (row-major index).
class ViewNameTemplate {
 public:
  explicit ViewNameTemplate(std::string_view pattern);
  std::string expand(int row, int col, int cols) const;
  const std::string& pattern() const noexcept { return pattern_; }

 private:
  enum class Field { Literal, Row, Col, Index };
  struct Piece {
    Field field;
    std::string text;
    int width;
  };
  std::string pattern_;
  std::vector<Piece> pieces_;
};

LightFieldGrid load_from_directory(const std::filesystem::path& dir, std::string_view pattern,
                                   int rows, int cols);

/// Slices one atlas image into rows x cols equal tiles.
LightFieldGrid load_from_atlas(const std::filesystem::path& path, int rows, int cols);
LightFieldGrid slice_atlas(const Image& atlas, int rows, int cols, std::string source_id = {});

}  // namespace pforge
