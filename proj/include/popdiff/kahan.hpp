#pragma once

namespace popdiff {

/// Compensated (Kahan) accumulator; works for double and std::complex<double>.
template <class T>
class KahanSum {
 public:
  void add(const T& v) {
    const T y = v - comp_;
    const T t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  KahanSum& operator+=(const T& v) {
    add(v);
    return *this;
  }
  void merge(const KahanSum& o) {
    add(o.sum_);
    add(-o.comp_);
  }
  T value() const { return sum_; }

 private:
  T sum_{};
  T comp_{};
};

}  // namespace popdiff
