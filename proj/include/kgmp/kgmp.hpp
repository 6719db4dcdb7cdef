#pragma once

#include "kgmp/common.hpp"
#include "kgmp/limit_profile.hpp"
#include "kgmp/manifold.hpp"
#include "kgmp/linalg.hpp"
#include "kgmp/elliptic.hpp"
#include "kgmp/psi.hpp"
#include "kgmp/energy.hpp"
#include "kgmp/ansatz.hpp"
#include "kgmp/reduction.hpp"
#include "kgmp/nonlinear_solver.hpp"
#include "kgmp/geometry_checks.hpp"
