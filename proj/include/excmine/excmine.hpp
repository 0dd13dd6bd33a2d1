#pragma once

#include "excmine/bio.hpp"
#include "excmine/corpus.hpp"
#include "excmine/crf.hpp"
#include "excmine/eval.hpp"
#include "excmine/features.hpp"
#include "excmine/io.hpp"
#include "excmine/model_io.hpp"
#include "excmine/phrase_clf.hpp"
#include "excmine/types.hpp"
#include "excmine/util.hpp"
