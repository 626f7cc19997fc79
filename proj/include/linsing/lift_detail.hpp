#pragma once

#include <vector>

#include "linsing/expr.hpp"

namespace linsing::detail {

inline std::vector<std::vector<Expression>> reshape_rows(
    const std::vector<Expression>& flat, int rows, int cols) {
  std::vector<std::vector<Expression>> out;
  out.reserve(rows);
  for (int r = 0; r < rows; ++r) {
    std::vector<Expression> row;
    row.reserve(cols);
    for (int c = 0; c < cols; ++c)
      row.push_back(flat[static_cast<std::size_t>(r) * cols + c]);
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace linsing::detail
