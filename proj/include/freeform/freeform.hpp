#pragma once

// Numerical core: space forms, curvature algebra, hypersurfaces, functionals and the Reilly machinery.
// The reporting layer (report.hpp, suite.hpp) additionally needs nlohmann/json.

#include "freeform/chart_immersion.hpp"
#include "freeform/diagnostics.hpp"
#include "freeform/error.hpp"
#include "freeform/field.hpp"
#include "freeform/frame.hpp"
#include "freeform/functionals.hpp"
#include "freeform/immersion.hpp"
#include "freeform/jet.hpp"
#include "freeform/profile.hpp"
#include "freeform/profile_immersion.hpp"
#include "freeform/quadrature.hpp"
#include "freeform/reilly.hpp"
#include "freeform/shapes.hpp"
#include "freeform/spaceform.hpp"
#include "freeform/symalg.hpp"
