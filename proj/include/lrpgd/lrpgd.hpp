#pragma once

#include "lrpgd/core.hpp"
#include "lrpgd/gradcheck.hpp"
#include "lrpgd/linalg.hpp"
#include "lrpgd/models/matrix_completion.hpp"
#include "lrpgd/models/matrix_decomposition.hpp"
#include "lrpgd/models/matrix_regression.hpp"
#include "lrpgd/models/one_bit.hpp"
#include "lrpgd/models/planted_subgraph.hpp"
#include "lrpgd/models/quadratic.hpp"
#include "lrpgd/models/sparse_pca.hpp"
#include "lrpgd/probe.hpp"
#include "lrpgd/projections.hpp"
#include "lrpgd/random.hpp"
#include "lrpgd/solver.hpp"
