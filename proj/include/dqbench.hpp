#pragma once

#include "dqbench/accuracy.hpp"
#include "dqbench/core.hpp"
#include "dqbench/corpus.hpp"
#include "dqbench/csv.hpp"
#include "dqbench/dataset_io.hpp"
#include "dqbench/discretize.hpp"
#include "dqbench/expr.hpp"
#include "dqbench/folds.hpp"
#include "dqbench/manifest.hpp"
#include "dqbench/noise.hpp"
#include "dqbench/outliers.hpp"
#include "dqbench/provenance.hpp"
#include "dqbench/relevance.hpp"
#include "dqbench/report.hpp"
#include "dqbench/tree.hpp"
