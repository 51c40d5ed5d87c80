#pragma once

#include "mcsim/arch.hpp"
#include "mcsim/cache.hpp"
#include "mcsim/csc.hpp"
#include "mcsim/dense.hpp"
#include "mcsim/golden.hpp"
#include "mcsim/matio.hpp"
#include "mcsim/memimg.hpp"
#include "mcsim/network.hpp"
#include "mcsim/program.hpp"
#include "mcsim/runner.hpp"
#include "mcsim/sim.hpp"
#include "mcsim/spmv.hpp"
#include "mcsim/types.hpp"
