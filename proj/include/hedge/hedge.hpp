#pragma once

#include "hedge/errors.hpp"
#include "hedge/distributions.hpp"
#include "hedge/moments.hpp"
#include "hedge/solver.hpp"
#include "hedge/frontier.hpp"
#include "hedge/analytics.hpp"
#include "hedge/io.hpp"
#include "hedge/pipeline.hpp"
