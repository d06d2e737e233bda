#pragma once

#include "mteq/error.hpp"
#include "mteq/linalg.hpp"
#include "mteq/tensor.hpp"
#include "mteq/structure.hpp"
#include "mteq/solvers.hpp"
#include "mteq/problems.hpp"
#include "mteq/io.hpp"
#include "mteq/bench.hpp"
