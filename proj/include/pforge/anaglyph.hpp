#pragma once

#include <stdexcept>

#include "pforge/image.hpp"

namespace pforge {

class AnaglyphSizeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Red/cyan colour anaglyph: R from the left view, G and B from the right.
AnaglyphFrame compose(const ViewImage& left, const ViewImage& right);

/// Same pixels as compose(), written into out. out is (re)sized only when its
/// dimensions differ from the views, so a correctly sized buffer is reused
/// without allocation.
void compose_into(const ViewImage& left, const ViewImage& right, AnaglyphFrame& out);

}  // namespace pforge
