#pragma once

#include "macrobell/errors.hpp"
#include "macrobell/fock.hpp"
#include "macrobell/invariants.hpp"
#include "macrobell/josephson.hpp"
#include "macrobell/kerr_cat.hpp"
#include "macrobell/nelder_mead.hpp"
#include "macrobell/noon_bell.hpp"
#include "macrobell/parallel.hpp"
#include "macrobell/param_search.hpp"
#include "macrobell/tridiagonal.hpp"
