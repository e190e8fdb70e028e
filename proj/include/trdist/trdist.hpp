#pragma once

#include "trdist/error.hpp"
#include "trdist/quadratic.hpp"
#include "trdist/trs.hpp"
#include "trdist/two_step.hpp"
#include "trdist/prob.hpp"
#include "trdist/problem_io.hpp"
