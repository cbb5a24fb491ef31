#pragma once

#include <string>
#include <vector>

namespace encore {

/// One labeled group of values for a boxplot.
struct BoxGroup {
  std::string label;
  std::vector<double> values;
};

/// Writes a self-contained SVG boxplot. Boxes span the quartiles, whiskers
/// extend to the most extreme values within 1.5 IQR of the box, and points
/// beyond the whiskers are drawn individually.
void write_boxplot_svg(const std::string& path, const std::string& title,
                       const std::string& y_label,
                       const std::vector<BoxGroup>& groups);

}  // namespace encore
