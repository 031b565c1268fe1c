#include "hardy/sparse.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "hardy/errors.hpp"

namespace hardy {

double CsrMatrix::entry(std::size_t i, std::size_t j) const {
  const auto b = col.begin() + row_ptr[i];
  const auto e = col.begin() + row_ptr[i + 1];
  const auto it = std::lower_bound(b, e, static_cast<std::int32_t>(j));
  if (it == e || *it != static_cast<std::int32_t>(j)) return 0.0;
  return val[it - col.begin()];
}

double CsrMatrix::asymmetry() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (auto p = row_ptr[i]; p < row_ptr[i + 1]; ++p)
      worst = std::max(worst, std::abs(val[p] - entry(static_cast<std::size_t>(col[p]), i)));
  return worst;
}

void CsrMatrix::write_triplets(std::ostream& os) const {
  os << "# rows " << n << " nnz " << nnz() << "\n";
  for (std::size_t i = 0; i < n; ++i)
    for (auto p = row_ptr[i]; p < row_ptr[i + 1]; ++p)
      os << fmt::format("{} {} {:.17g}\n", i, col[p], val[p]);
}

CsrBuilder::CsrBuilder(std::size_t n) {
  m_.n = n;
  m_.row_ptr.reserve(n + 1);
  m_.row_ptr.push_back(0);
  m_.diag_pos.reserve(n);
}

void CsrBuilder::finish_row() {
  const auto row = static_cast<std::int32_t>(m_.row_ptr.size() - 1);
  if (static_cast<std::size_t>(row) >= m_.n) throw NumericalError("CsrBuilder: too many rows");
  row_.push_back({row, 0.0});
  std::sort(row_.begin(), row_.end(), [](const Entry& a, const Entry& b) { return a.col < b.col; });
  std::int64_t diag = -1;
  for (std::size_t i = 0; i < row_.size();) {
    double v = 0.0;
    const std::int32_t c = row_[i].col;
    for (; i < row_.size() && row_[i].col == c; ++i) v += row_[i].val;
    if (c == row) diag = static_cast<std::int64_t>(m_.val.size());
    m_.col.push_back(c);
    m_.val.push_back(v);
  }
  m_.diag_pos.push_back(diag);
  m_.row_ptr.push_back(static_cast<std::int64_t>(m_.val.size()));
  row_.clear();
}

CsrMatrix CsrBuilder::build() {
  if (m_.row_ptr.size() != m_.n + 1) throw NumericalError("CsrBuilder: incomplete matrix");
  return std::move(m_);
}

}  // namespace hardy
