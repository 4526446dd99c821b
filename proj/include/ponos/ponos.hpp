#pragma once
// Umbrella header for the PONOS toxicity-scoring engine.

#include "ponos/chat_client.hpp"
#include "ponos/config.hpp"
#include "ponos/errors.hpp"
#include "ponos/eval.hpp"
#include "ponos/ingest.hpp"
#include "ponos/knn.hpp"
#include "ponos/lexicon.hpp"
#include "ponos/metric.hpp"
#include "ponos/predictor.hpp"
#include "ponos/sentiment.hpp"
#include "ponos/thread_model.hpp"
#include "ponos/util.hpp"
