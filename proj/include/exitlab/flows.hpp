#pragma once

#include <string>

#include "exitlab/grid.hpp"

namespace exitlab {

// Named incompressible test flows. Every flow is built as a stream function
// that vanishes on the boundary and differentiated with perp_gradient, so the
// sampled field is discretely divergence-free and analytically tangential.
//   zero      u = 0
//   cellular  s * sin(k pi xh) sin(k pi yh) (times a boundary bump off the
//             rectangle, where the sine factors already vanish)
//   shear     s * bump * (2(y-cy)/Ly)^2  -- a recirculating horizontal shear
//   perp-tau0 the flow of the zero-flow exit time (solved on demand)
//   stream:<file.csv>  stream function read from a field CSV
struct Flow {
  std::string name;
  VectorField u;
  ScalarField stream;     // empty grid pointer when the flow is zero
  bool has_stream = false;
};

Flow make_flow(const std::shared_ptr<const DomainGrid>& domain, const std::string& name);

}  // namespace exitlab
