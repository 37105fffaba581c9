#pragma once

#include "fiper/error.hpp"
#include "fiper/model.hpp"
#include "fiper/rule_text.hpp"
#include "fiper/document.hpp"
#include "fiper/stats.hpp"
#include "fiper/view.hpp"
#include "fiper/svg.hpp"
#include "fiper/study.hpp"
#include "fiper/serialize.hpp"
#include "fiper/store.hpp"
#include "fiper/service.hpp"
