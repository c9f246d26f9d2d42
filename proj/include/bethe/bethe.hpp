#pragma once

#include "asymptotics.hpp"
#include "fredholm.hpp"
#include "identities.hpp"
#include "linalg.hpp"
#include "models.hpp"
#include "numeric.hpp"
#include "quadrature.hpp"
#include "rootfind.hpp"
#include "sine_kernel.hpp"
#include "specfun.hpp"
#include "thermo.hpp"
