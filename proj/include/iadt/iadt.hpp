#ifndef IADT_IADT_HPP
#define IADT_IADT_HPP

#include "iadt/aal.hpp"
#include "iadt/baselines.hpp"
#include "iadt/data.hpp"
#include "iadt/errors.hpp"
#include "iadt/eval.hpp"
#include "iadt/losses.hpp"
#include "iadt/model_io.hpp"
#include "iadt/network.hpp"
#include "iadt/numerics.hpp"
#include "iadt/training.hpp"

#endif  // IADT_IADT_HPP
