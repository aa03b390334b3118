#ifndef FASTSPARSE_FASTSPARSE_HPP
#define FASTSPARSE_FASTSPARSE_HPP

#include "binarize.hpp"
#include "core.hpp"
#include "csv.hpp"
#include "descent.hpp"
#include "exponential.hpp"
#include "logistic.hpp"
#include "metrics.hpp"
#include "path.hpp"
#include "swap_search.hpp"
#include "synth.hpp"

#endif  // FASTSPARSE_FASTSPARSE_HPP
