#pragma once

#include "jspursuit/core.hpp"
#include "jspursuit/random.hpp"
#include "jspursuit/matmodel.hpp"
#include "jspursuit/subspace.hpp"
#include "jspursuit/pursuit.hpp"
#include "jspursuit/baselines.hpp"
#include "jspursuit/diagnostics.hpp"
#include "jspursuit/bounds.hpp"
#include "jspursuit/io.hpp"
#include "jspursuit/harness.hpp"
