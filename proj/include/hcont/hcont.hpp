/// \file hcont.hpp
/// Umbrella header for the hcont library.
#pragma once

#include "hcont/xprec.hpp"
#include "hcont/complex.hpp"
#include "hcont/errors.hpp"
#include "hcont/matrix.hpp"
#include "hcont/quadrature.hpp"
#include "hcont/geometry.hpp"
#include "hcont/operator.hpp"
#include "hcont/fit.hpp"
#include "hcont/spectral.hpp"
#include "hcont/continuation.hpp"
#include "hcont/specfun.hpp"
#include "hcont/asymptotics.hpp"
#include "hcont/boundary.hpp"
