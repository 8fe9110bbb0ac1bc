#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace winfer {

enum class SupportKind { finite_alphabet, real_line, half_line, nonneg_integers, real_vector };
enum class ReferenceMeasure { counting, lebesgue };

// Outcome space. On finite alphabets a point is addressed by its index; the
// numeric value attached to each symbol (default: the index itself) is what
// value-based weights such as e^{gamma x} see.
class Support {
 public:
  static Support finite(std::size_t m);
  static Support finite(std::vector<double> values, std::vector<std::string> labels = {});
  static Support real_line();
  static Support half_line(double lower);
  static Support nonneg_integers();
  static Support real_vector(std::size_t d);

  SupportKind kind() const { return kind_; }
  ReferenceMeasure measure() const;
  bool discrete() const { return measure() == ReferenceMeasure::counting; }

  std::size_t size() const { return values_.size(); }  // finite alphabets only
  std::size_t dim() const { return dim_; }
  double lower() const { return lower_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<std::string>& labels() const { return labels_; }
  bool contains(double x) const;

  bool operator==(const Support& other) const;
  bool operator!=(const Support& other) const { return !(*this == other); }

 private:
  SupportKind kind_ = SupportKind::real_line;
  std::vector<double> values_;
  std::vector<std::string> labels_;
  double lower_ = 0.0;
  std::size_t dim_ = 1;
};

}  // namespace winfer
