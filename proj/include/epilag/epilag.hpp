#pragma once

// Umbrella header: the whole analysis pipeline.
//
// ingest      parse/merge/clean district datasets   (ingest.hpp, dataset.hpp)
// correlation Spearman + lagged sweeps and peaks    (correlation.hpp, lag.hpp)
// regressors  tree / forest / boosting / MLP        (tree.hpp .. mlp.hpp, model.hpp)
// evaluation  metrics, splits, CV, grid search      (metrics.hpp, evaluation.hpp)
// synth       seeded generator + oracles            (synth.hpp)
// cli         config + pipeline commands            (config.hpp, pipeline.hpp)

#include "epilag/boosting.hpp"
#include "epilag/config.hpp"
#include "epilag/correlation.hpp"
#include "epilag/csv.hpp"
#include "epilag/dataset.hpp"
#include "epilag/dates.hpp"
#include "epilag/errors.hpp"
#include "epilag/evaluation.hpp"
#include "epilag/fetch.hpp"
#include "epilag/forest.hpp"
#include "epilag/ingest.hpp"
#include "epilag/lag.hpp"
#include "epilag/matrix.hpp"
#include "epilag/metrics.hpp"
#include "epilag/mlp.hpp"
#include "epilag/model.hpp"
#include "epilag/parallel.hpp"
#include "epilag/pipeline.hpp"
#include "epilag/rng.hpp"
#include "epilag/standardize.hpp"
#include "epilag/synth.hpp"
#include "epilag/tree.hpp"
#include "epilag/variables.hpp"
