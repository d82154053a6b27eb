#pragma once

#include "c0wg/errors.hpp"
#include "c0wg/mesh.hpp"
#include "c0wg/quadrature.hpp"
#include "c0wg/polybasis.hpp"
#include "c0wg/space.hpp"
#include "c0wg/element.hpp"
#include "c0wg/weaklap.hpp"
#include "c0wg/lift_bubble.hpp"
#include "c0wg/assemble.hpp"
#include "c0wg/solve.hpp"
#include "c0wg/errnorms.hpp"
#include "c0wg/convergence.hpp"
