#pragma once

#include <cassert>
#include <cstddef>
#include <span>

namespace faqir {

// Non-owning row-major view of a dense matrix.
struct MatrixView {
  const double* data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::span<const double> row(std::size_t i) const {
    assert(i < rows);
    return {data + i * cols, cols};
  }
  std::span<const double> flat() const { return {data, rows * cols}; }
};

}  // namespace faqir
