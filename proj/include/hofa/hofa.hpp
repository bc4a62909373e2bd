#pragma once

// Everything at once.

#include "hofa/common.hpp"
#include "hofa/torus.hpp"
#include "hofa/tables.hpp"
#include "hofa/modular_linalg.hpp"
#include "hofa/polynomial.hpp"
#include "hofa/gowers.hpp"
#include "hofa/factor.hpp"
#include "hofa/homogeneous.hpp"
#include "hofa/factor_search.hpp"
#include "hofa/linear_form.hpp"
#include "hofa/linear_forms.hpp"
#include "hofa/consistency.hpp"
#include "hofa/experiment.hpp"
