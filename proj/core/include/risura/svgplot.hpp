#pragma once

#include <string>
#include <vector>

namespace risura {

// Minimal self-contained line plot; output is byte-deterministic for
// identical inputs. Non-finite points are dropped.
void write_line_svg(const std::string& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace risura
