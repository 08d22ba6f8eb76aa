#pragma once

// Conversational query rewriting: parameterized context-window rewrite and
// recursive query fusion, with offline providers and an evaluation harness.

#include "qrew/config.hpp"
#include "qrew/context.hpp"
#include "qrew/dataset.hpp"
#include "qrew/engine.hpp"
#include "qrew/errors.hpp"
#include "qrew/eval.hpp"
#include "qrew/gate.hpp"
#include "qrew/hash_embed.hpp"
#include "qrew/http_provider.hpp"
#include "qrew/metrics.hpp"
#include "qrew/mocks.hpp"
#include "qrew/prompt.hpp"
#include "qrew/providers.hpp"
#include "qrew/report.hpp"
#include "qrew/rules.hpp"
#include "qrew/session.hpp"
#include "qrew/synthetic.hpp"
#include "qrew/text.hpp"
