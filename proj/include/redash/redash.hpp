#pragma once

#include "redash/catalog.hpp"
#include "redash/digest.hpp"
#include "redash/errors.hpp"
#include "redash/http_clients.hpp"
#include "redash/ingest.hpp"
#include "redash/matching.hpp"
#include "redash/model.hpp"
#include "redash/ops.hpp"
#include "redash/render.hpp"
#include "redash/serialize.hpp"
#include "redash/service.hpp"
#include "redash/session.hpp"
#include "redash/time.hpp"
#include "redash/transfer.hpp"
#include "redash/validate.hpp"
#include "redash/vocabulary.hpp"
