#pragma once

#include <string>
#include <vector>

#include "exitlab/grid.hpp"

namespace exitlab {

// Field CSV layout:
//   nx,ny,hx,hy,x0,y0
//   <values>
//   i,j,value
//   <one row per active node>
// Exterior nodes are omitted. Values are written with enough digits to round-trip.
void write_field_csv(const std::string& path, const ScalarField& f);

// Reading attaches the field to `grid` and checks the header against it.
ScalarField read_field_csv(const std::string& path,
                           const std::shared_ptr<const DomainGrid>& grid,
                           bool zero_boundary = true);

// Formatting helpers shared by all writers (fixed formats keep artifacts
// byte-stable across runs).
std::string fmt_g17(double v);
std::string fmt_g(double v, int prec);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace exitlab
