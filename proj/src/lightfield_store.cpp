#include "pforge/lightfield_store.hpp"

#include <algorithm>
#include <cstring>

#include "pforge/image_io.hpp"

namespace pforge {

LightFieldError::LightFieldError(Kind kind, const std::string& what, int row, int col,
                                 std::filesystem::path file)
    : std::runtime_error(what), kind_(kind), row_(row), col_(col), file_(std::move(file)) {}

LightFieldGrid::LightFieldGrid(int rows, int cols, std::vector<ViewImage> views,
                               std::string source_id)
    : rows_(rows), cols_(cols), source_id_(std::move(source_id)), views_(std::move(views)) {
  if (rows_ < 1 || cols_ < 1) throw std::invalid_argument("light field grid needs rows, cols >= 1");
  if (views_.size() != static_cast<std::size_t>(rows_) * static_cast<std::size_t>(cols_)) {
    throw std::invalid_argument("light field grid expects " + std::to_string(rows_ * cols_) +
                                " views, got " + std::to_string(views_.size()));
  }
  const ViewImage& first = views_.front();
  if (first.empty()) throw std::invalid_argument("light field view (0,0) is empty");
  view_width_ = first.width();
  view_height_ = first.height();
  for (std::size_t i = 1; i < views_.size(); ++i) {
    if (!views_[i].same_size(first)) {
      const int r = static_cast<int>(i) / cols_;
      const int c = static_cast<int>(i) % cols_;
      throw LightFieldError(LightFieldError::Kind::DimensionMismatch,
                            "view (" + std::to_string(r) + "," + std::to_string(c) + ") is " +
                                std::to_string(views_[i].width()) + "x" +
                                std::to_string(views_[i].height()) + ", expected " +
                                std::to_string(view_width_) + "x" + std::to_string(view_height_),
                            r, c);
    }
  }
}

const ViewImage& LightFieldGrid::view(int row, int col) const {
  if (row < 0 || row >= rows_ || col < 0 || col >= cols_) {
    throw std::out_of_range("view (" + std::to_string(row) + "," + std::to_string(col) +
                            ") outside " + std::to_string(rows_) + "x" + std::to_string(cols_) +
                            " grid");
  }
  return views_[static_cast<std::size_t>(row) * cols_ + col];
}

Image LightFieldGrid::to_atlas() const {
  Image atlas(view_width_ * cols_, view_height_ * rows_);
  const std::size_t tile_row = static_cast<std::size_t>(view_width_) * 3;
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      const ViewImage& v = view(r, c);
      for (int y = 0; y < view_height_; ++y) {
        std::memcpy(atlas.at(c * view_width_, r * view_height_ + y), v.at(0, y), tile_row);
      }
    }
  }
  return atlas;
}

ViewNameTemplate::ViewNameTemplate(std::string_view pattern) : pattern_(pattern) {
  bool has_row = false;
  bool has_col = false;
  bool has_index = false;
  std::string literal;
  std::size_t i = 0;
  while (i < pattern.size()) {
    if (pattern[i] != '{') {
      literal.push_back(pattern[i++]);
      continue;
    }
    const std::size_t close = pattern.find('}', i);
    if (close == std::string_view::npos) {
      throw LightFieldError(LightFieldError::Kind::InvalidLayout,
                            "unterminated placeholder in '" + pattern_ + "'");
    }
    std::string_view body = pattern.substr(i + 1, close - i - 1);
    int width = 0;
    if (const auto colon = body.find(':'); colon != std::string_view::npos) {
      const std::string_view spec = body.substr(colon + 1);
      if (spec.empty() || spec.size() > 2 ||
          !std::all_of(spec.begin(), spec.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        throw LightFieldError(LightFieldError::Kind::InvalidLayout,
                              "bad padding '" + std::string(spec) + "' in '" + pattern_ + "'");
      }
      width = std::stoi(std::string(spec));
      body = body.substr(0, colon);
    }
    Field field;
    if (body == "row") {
      field = Field::Row;
      has_row = true;
    } else if (body == "col") {
      field = Field::Col;
      has_col = true;
    } else if (body == "index") {
      field = Field::Index;
      has_index = true;
    } else {
      throw LightFieldError(LightFieldError::Kind::InvalidLayout,
                            "unknown placeholder {" + std::string(body) + "} in '" + pattern_ + "'");
    }
    if (!literal.empty()) pieces_.push_back({Field::Literal, std::move(literal), 0});
    literal.clear();
    pieces_.push_back({field, {}, width});
    i = close + 1;
  }
  if (!literal.empty()) pieces_.push_back({Field::Literal, std::move(literal), 0});

  const bool row_col = has_row && has_col && !has_index;
  const bool index_only = has_index && !has_row && !has_col;
  if (!row_col && !index_only) {
    throw LightFieldError(LightFieldError::Kind::InvalidLayout,
                          "template '" + pattern_ + "' needs {row} and {col}, or {index} alone");
  }
}

std::string ViewNameTemplate::expand(int row, int col, int cols) const {
  std::string out;
  for (const Piece& p : pieces_) {
    int value = 0;
    switch (p.field) {
      case Field::Literal:
        out += p.text;
        continue;
      case Field::Row:
        value = row;
        break;
      case Field::Col:
        value = col;
        break;
      case Field::Index:
        value = row * cols + col;
        break;
    }
    std::string digits = std::to_string(value);
    if (static_cast<int>(digits.size()) < p.width) {
      digits.insert(0, static_cast<std::size_t>(p.width) - digits.size(), '0');
    }
    out += digits;
  }
  return out;
}

LightFieldGrid load_from_directory(const std::filesystem::path& dir, std::string_view pattern,
                                   int rows, int cols) {
  if (rows < 1 || cols < 1) {
    throw LightFieldError(LightFieldError::Kind::InvalidLayout, "rows and cols must be >= 1");
  }
  const ViewNameTemplate names(pattern);
  std::vector<ViewImage> views;
  views.reserve(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const std::filesystem::path file = dir / names.expand(r, c, cols);
      if (!std::filesystem::is_regular_file(file)) {
        throw LightFieldError(LightFieldError::Kind::MissingView,
                              "missing view (" + std::to_string(r) + "," + std::to_string(c) +
                                  "): " + file.string(),
                              r, c, file);
      }
      try {
        views.push_back(read_image(file));
      } catch (const ImageDecodeError& e) {
        throw LightFieldError(LightFieldError::Kind::DecodeError, e.what(), r, c, file);
      }
      if (!views.back().same_size(views.front())) {
        throw LightFieldError(LightFieldError::Kind::DimensionMismatch,
                              file.string() + " is " + std::to_string(views.back().width()) + "x" +
                                  std::to_string(views.back().height()) + ", first view is " +
                                  std::to_string(views.front().width()) + "x" +
                                  std::to_string(views.front().height()),
                              r, c, file);
      }
    }
  }
  return LightFieldGrid(rows, cols, std::move(views), (dir / pattern).string());
}

LightFieldGrid slice_atlas(const Image& atlas, int rows, int cols, std::string source_id) {
  if (rows < 1 || cols < 1) {
    throw LightFieldError(LightFieldError::Kind::InvalidLayout, "rows and cols must be >= 1");
  }
  if (atlas.width() % cols != 0 || atlas.height() % rows != 0) {
    throw LightFieldError(LightFieldError::Kind::IndivisibleAtlas,
                          "atlas " + std::to_string(atlas.width()) + "x" +
                              std::to_string(atlas.height()) + " does not split into " +
                              std::to_string(rows) + " rows x " + std::to_string(cols) + " cols");
  }
  const int tile_w = atlas.width() / cols;
  const int tile_h = atlas.height() / rows;
  const std::size_t tile_row = static_cast<std::size_t>(tile_w) * 3;
  std::vector<ViewImage> views;
  views.reserve(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      ViewImage tile(tile_w, tile_h);
      for (int y = 0; y < tile_h; ++y) {
        std::memcpy(tile.at(0, y), atlas.at(c * tile_w, r * tile_h + y), tile_row);
      }
      views.push_back(std::move(tile));
    }
  }
  return LightFieldGrid(rows, cols, std::move(views), std::move(source_id));
}

LightFieldGrid load_from_atlas(const std::filesystem::path& path, int rows, int cols) {
  Image atlas;
  try {
    atlas = read_image(path);
  } catch (const ImageDecodeError& e) {
    throw LightFieldError(LightFieldError::Kind::DecodeError, e.what(), -1, -1, path);
  }
  return slice_atlas(atlas, rows, cols, path.string());
}

}  // namespace pforge
