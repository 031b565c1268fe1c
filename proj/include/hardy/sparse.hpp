#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

namespace hardy {

// Compressed sparse rows with sorted column indices and a cached diagonal
// position per row.
struct CsrMatrix {
  std::size_t n = 0;
  std::vector<std::int64_t> row_ptr;
  std::vector<std::int32_t> col;
  std::vector<double> val;
  std::vector<std::int64_t> diag_pos;

  std::size_t nnz() const { return val.size(); }
  double diag(std::size_t i) const { return val[diag_pos[i]]; }
  // Largest |a_ij - a_ji|.
  double asymmetry() const;
  double entry(std::size_t i, std::size_t j) const;
  void write_triplets(std::ostream& os) const;
};

// Row-by-row builder; entries of one row may repeat and are summed.
class CsrBuilder {
 public:
  explicit CsrBuilder(std::size_t n);
  void add(std::int32_t col, double v) { row_.push_back({col, v}); }
  // Closes the current row. A diagonal entry is created if absent.
  void finish_row();
  CsrMatrix build();

 private:
  struct Entry {
    std::int32_t col;
    double val;
  };
  CsrMatrix m_;
  std::vector<Entry> row_;
};

}  // namespace hardy
