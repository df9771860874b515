// SPDX-License-Identifier: (Apache-2.0 OR MIT)
#pragma once

#include "sphera/special_fn.hpp"
#include "sphera/coefficients.hpp"
#include "sphera/expansion.hpp"
#include "sphera/models.hpp"
#include "sphera/sampling.hpp"
#include "sphera/estimation.hpp"
#include "sphera/hypothesis.hpp"
#include "sphera/fitting.hpp"
#include "sphera/io.hpp"
