#pragma once

// Umbrella header.

#include "closed_form.hpp"
#include "el_ode.hpp"
#include "error.hpp"
#include "expr.hpp"
#include "formal.hpp"
#include "jet.hpp"
#include "ode_geometry.hpp"
#include "quadrature.hpp"
#include "schwarzian.hpp"
#include "taylor.hpp"
#include "variation.hpp"
