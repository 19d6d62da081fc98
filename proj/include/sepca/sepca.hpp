#ifndef SEPCA_SEPCA_HPP
#define SEPCA_SEPCA_HPP

#include "sepca/algorithm.hpp"
#include "sepca/bench.hpp"
#include "sepca/error.hpp"
#include "sepca/fdr.hpp"
#include "sepca/geometry.hpp"
#include "sepca/io.hpp"
#include "sepca/matrix.hpp"
#include "sepca/model.hpp"
#include "sepca/parallel.hpp"
#include "sepca/pipeline.hpp"
#include "sepca/rng.hpp"
#include "sepca/row_stats.hpp"
#include "sepca/selection.hpp"
#include "sepca/special.hpp"
#include "sepca/svd.hpp"
#include "sepca/theory.hpp"

#endif  // SEPCA_SEPCA_HPP
