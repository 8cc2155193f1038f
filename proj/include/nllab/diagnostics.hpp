#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "nllab/error.hpp"
#include "nllab/numfmt.hpp"

namespace nllab {

/// Scalar time series sharing one strictly increasing time axis.
class DiagnosticSeries {
 public:
  explicit DiagnosticSeries(std::vector<std::string> channel_names = {}) {
    for (auto& n : channel_names) channels_.emplace_back(std::move(n), std::vector<double>{});
  }

  void add_channel(const std::string& name) {
    ensure(times_.empty(), "channels must be declared before recording");
    channels_.emplace_back(name, std::vector<double>{});
  }

  // Values in channel declaration order.
  void record(double t, const std::vector<double>& values) {
    ensure(values.size() == channels_.size(), "diagnostic record has wrong arity");
    ensure(times_.empty() || t > times_.back(), "diagnostic times must be strictly increasing");
    times_.push_back(t);
    for (std::size_t c = 0; c < channels_.size(); ++c) channels_[c].second.push_back(values[c]);
  }

  const std::vector<double>& times() const { return times_; }
  std::size_t size() const { return times_.size(); }
  bool has(const std::string& name) const {
    for (const auto& c : channels_) {
      if (c.first == name) return true;
    }
    return false;
  }
  const std::vector<double>& channel(const std::string& name) const {
    for (const auto& c : channels_) {
      if (c.first == name) return c.second;
    }
    throw LabError("no diagnostic channel '" + name + "'");
  }
  std::vector<std::string> channel_names() const {
    std::vector<std::string> out;
    for (const auto& c : channels_) out.push_back(c.first);
    return out;
  }
  double last(const std::string& name) const { return channel(name).back(); }

  void write_csv(std::ostream& os) const {
    os << 't';
    for (const auto& c : channels_) os << ',' << c.first;
    os << '\n';
    for (std::size_t k = 0; k < times_.size(); ++k) {
      os << format_double(times_[k]);
      for (const auto& c : channels_) os << ',' << format_double(c.second[k]);
      os << '\n';
    }
  }

 private:
  std::vector<double> times_;
  std::vector<std::pair<std::string, std::vector<double>>> channels_;
};

inline const std::vector<std::string>& standard_channels() {
  static const std::vector<std::string> names = {
      "mass", "window_mass", "entropy", "baricenter", "support_lo", "support_hi"};
  return names;
}

}  // namespace nllab
