#pragma once

// Umbrella header: the whole library is header-only.

#include "hemcnn/augment.hpp"
#include "hemcnn/config.hpp"
#include "hemcnn/conv.hpp"
#include "hemcnn/csv.hpp"
#include "hemcnn/design.hpp"
#include "hemcnn/eval.hpp"
#include "hemcnn/features.hpp"
#include "hemcnn/filter.hpp"
#include "hemcnn/glm.hpp"
#include "hemcnn/hpca.hpp"
#include "hemcnn/hrf.hpp"
#include "hemcnn/layout.hpp"
#include "hemcnn/linalg.hpp"
#include "hemcnn/manifest.hpp"
#include "hemcnn/mbll.hpp"
#include "hemcnn/model.hpp"
#include "hemcnn/model_io.hpp"
#include "hemcnn/nn.hpp"
#include "hemcnn/report.hpp"
#include "hemcnn/rng.hpp"
#include "hemcnn/signal.hpp"
#include "hemcnn/special.hpp"
#include "hemcnn/stats.hpp"
#include "hemcnn/synthetic.hpp"
#include "hemcnn/tensor.hpp"
#include "hemcnn/train.hpp"
#include "hemcnn/tree.hpp"
#include "hemcnn/trial.hpp"
