#pragma once

#include "nlps/corpus.hpp"
#include "nlps/corpus_io.hpp"
#include "nlps/error.hpp"
#include "nlps/evaluation.hpp"
#include "nlps/graph.hpp"
#include "nlps/model_io.hpp"
#include "nlps/pairs.hpp"
#include "nlps/parallel.hpp"
#include "nlps/pvdbow.hpp"
#include "nlps/ranking.hpp"
#include "nlps/stats.hpp"
#include "nlps/text.hpp"
#include "nlps/tfidf.hpp"
#include "nlps/tokenizer.hpp"
#include "nlps/wiki/build.hpp"
#include "nlps/wiki/categories.hpp"
#include "nlps/wiki/classify.hpp"
#include "nlps/wiki/clean.hpp"
#include "nlps/wiki/pages.hpp"
#include "nlps/wiki/sections.hpp"
