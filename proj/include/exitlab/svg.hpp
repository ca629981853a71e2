#pragma once

#include <string>
#include <vector>

#include "exitlab/grid.hpp"

namespace exitlab {

struct ContourPanel {
  std::string title;
  const ScalarField* field = nullptr;
  int levels = 10;
  std::string annotation;  // extra line under the title
};

// Deterministic contour figure: panels laid out in a row-major grid, each with
// the domain outline, filled level curves and a level legend.
std::string render_contour_svg(const std::vector<ContourPanel>& panels, int columns);

void write_contour_svg(const std::string& path, const ScalarField& field, int levels,
                       const std::string& title = "", const std::string& annotation = "");

// Contour polylines as CSV rows `level,curve_id,x,y`.
std::string contours_csv(const ScalarField& field, const std::vector<double>& levels);

}  // namespace exitlab
