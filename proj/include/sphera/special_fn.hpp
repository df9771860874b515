// SPDX-License-Identifier: (Apache-2.0 OR MIT)
#pragma once

#include "bessel.hpp"
#include "chi2.hpp"
#include "clebsch_gordan.hpp"
#include "geometry.hpp"
#include "harmonics.hpp"
#include "kummer.hpp"
#include "legendre.hpp"
#include "quadrature.hpp"
#include "wigner.hpp"
