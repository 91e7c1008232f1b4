#pragma once

#include <string>
#include <utility>
#include <vector>

namespace seqmatch::svg {

struct Series {
  std::string name;
  std::vector<double> values;
};

// Self-contained SVG: axes, one polyline per series, and a legend. Series
// may differ in length; x is the sample index.
std::string line_chart(const std::vector<Series>& series, const std::string& title);

}  // namespace seqmatch::svg
