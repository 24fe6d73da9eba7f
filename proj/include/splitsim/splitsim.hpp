#pragma once

#include "splitsim/oracle.hpp"
#include "splitsim/policy.hpp"
#include "splitsim/reward.hpp"
#include "splitsim/trace.hpp"
#include "splitsim/trace_io.hpp"
#include "splitsim/tracegen.hpp"
#include "splitsim/types.hpp"
