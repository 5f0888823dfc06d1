#include "oppscreen/oppscreen.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "app/commands.hpp"
#include "app/config.hpp"
#include "core/cascade.hpp"
#include "core/error.hpp"
#include "core/processed.hpp"

struct oppscreen_config {
  oppscreen::ConfigDocument doc;
};

struct oppscreen_cascade {
  oppscreen::CascadeModel model;
  oppscreen::SentimentLexicons lexicons;
};

namespace {

using nlohmann::json;

thread_local std::string last_error;

oppscreen_status status_of(oppscreen::ErrorKind k) {
  using oppscreen::ErrorKind;
  switch (k) {
    case ErrorKind::InvalidArgument: return OPPSCREEN_INVALID_ARGUMENT;
    case ErrorKind::Io: return OPPSCREEN_IO_ERROR;
    case ErrorKind::Parse: return OPPSCREEN_PARSE_ERROR;
    case ErrorKind::Data: return OPPSCREEN_DATA_ERROR;
    case ErrorKind::Training: return OPPSCREEN_TRAINING_ERROR;
    case ErrorKind::Version: return OPPSCREEN_VERSION_MISMATCH;
  }
  return OPPSCREEN_INTERNAL_ERROR;
}

template <typename F>
oppscreen_status guard(F&& fn) {
  try {
    fn();
    last_error.clear();
    return OPPSCREEN_OK;
  } catch (const oppscreen::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const json::exception& e) {
    last_error = e.what();
    return OPPSCREEN_PARSE_ERROR;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return OPPSCREEN_INTERNAL_ERROR;
  } catch (const std::exception& e) {
    last_error = e.what();
    return OPPSCREEN_INTERNAL_ERROR;
  } catch (...) {
    last_error = "unknown error";
    return OPPSCREEN_INTERNAL_ERROR;
  }
}

char* copy_out(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

void need(const void* p, const char* what) {
  if (!p) throw oppscreen::Error(oppscreen::ErrorKind::InvalidArgument, std::string(what) + " is null");
}

template <typename F>
oppscreen_status run(const oppscreen_config* cfg, char** out, F&& fn) {
  return guard([&] {
    need(cfg, "config");
    need(out, "output pointer");
    *out = nullptr;
    const auto rc = oppscreen::resolve(cfg->doc);
    *out = copy_out(fn(rc).dump());
  });
}

}  // namespace

extern "C" {

const char* oppscreen_last_error(void) { return last_error.c_str(); }

const char* oppscreen_version(void) { return "1.0.0"; }

const char* oppscreen_status_name(oppscreen_status status) {
  switch (status) {
    case OPPSCREEN_OK: return "ok";
    case OPPSCREEN_INVALID_ARGUMENT: return "invalid argument";
    case OPPSCREEN_IO_ERROR: return "i/o error";
    case OPPSCREEN_PARSE_ERROR: return "parse error";
    case OPPSCREEN_DATA_ERROR: return "data error";
    case OPPSCREEN_TRAINING_ERROR: return "training error";
    case OPPSCREEN_VERSION_MISMATCH: return "version mismatch";
    case OPPSCREEN_INTERNAL_ERROR: return "internal error";
  }
  return "unknown status";
}

void oppscreen_string_free(char* s) { std::free(s); }

oppscreen_status oppscreen_config_new(oppscreen_config** out) {
  return guard([&] {
    need(out, "output pointer");
    *out = new oppscreen_config();
  });
}

void oppscreen_config_free(oppscreen_config* cfg) { delete cfg; }

oppscreen_status oppscreen_config_load(oppscreen_config* cfg, const char* path) {
  return guard([&] {
    need(cfg, "config");
    need(path, "path");
    cfg->doc.load_file(path);
  });
}

oppscreen_status oppscreen_config_apply_env(oppscreen_config* cfg) {
  return guard([&] {
    need(cfg, "config");
    cfg->doc.apply_env([](const char* name) -> const char* { return std::getenv(name); });
  });
}

oppscreen_status oppscreen_config_set(oppscreen_config* cfg, const char* key, const char* value, const char* origin) {
  return guard([&] {
    need(cfg, "config");
    need(key, "key");
    need(value, "value");
    cfg->doc.set(key, value, origin ? origin : "set");
  });
}

oppscreen_status oppscreen_config_validate(const oppscreen_config* cfg) {
  return guard([&] {
    need(cfg, "config");
    (void)oppscreen::resolve(cfg->doc);
  });
}

oppscreen_status oppscreen_config_dump(const oppscreen_config* cfg, char** json_out) {
  return guard([&] {
    need(cfg, "config");
    need(json_out, "output pointer");
    *json_out = copy_out(cfg->doc.to_json().dump(2));
  });
}

oppscreen_status oppscreen_run_preprocess(const oppscreen_config* cfg, char** summary_json) {
  return run(cfg, summary_json, [](const oppscreen::RunConfig& rc) { return oppscreen::run_preprocess(rc); });
}

oppscreen_status oppscreen_run_grid_search(const oppscreen_config* cfg, char** summary_json) {
  return run(cfg, summary_json, [](const oppscreen::RunConfig& rc) { return oppscreen::run_grid_search(rc); });
}

oppscreen_status oppscreen_run_train(const oppscreen_config* cfg, char** summary_json) {
  return run(cfg, summary_json, [](const oppscreen::RunConfig& rc) { return oppscreen::run_train(rc); });
}

oppscreen_status oppscreen_run_experiment(const oppscreen_config* cfg, const int* protocols, size_t count,
                                          char** summary_json) {
  if (count > 0 && !protocols) {
    last_error = "protocols is null";
    return OPPSCREEN_INVALID_ARGUMENT;
  }
  std::vector<int> list(protocols, protocols + count);
  return run(cfg, summary_json, [&](const oppscreen::RunConfig& rc) { return oppscreen::run_experiment(rc, list); });
}

oppscreen_status oppscreen_run_classify(const oppscreen_config* cfg, char** summary_json) {
  return run(cfg, summary_json, [](const oppscreen::RunConfig& rc) { return oppscreen::run_classify(rc); });
}

oppscreen_status oppscreen_run_report(const oppscreen_config* cfg, const char* const* inputs, size_t count,
                                      char** summary_json) {
  if (count > 0 && !inputs) {
    last_error = "inputs is null";
    return OPPSCREEN_INVALID_ARGUMENT;
  }
  std::vector<std::filesystem::path> paths;
  for (size_t i = 0; i < count; ++i) {
    if (!inputs[i]) {
      last_error = "input path is null";
      return OPPSCREEN_INVALID_ARGUMENT;
    }
    paths.emplace_back(inputs[i]);
  }
  return run(cfg, summary_json, [&](const oppscreen::RunConfig& rc) { return oppscreen::run_report(rc, paths); });
}

oppscreen_status oppscreen_cascade_load(const oppscreen_config* cfg, const char* dir, oppscreen_cascade** out) {
  return guard([&] {
    need(cfg, "config");
    need(dir, "dir");
    need(out, "output pointer");
    *out = nullptr;
    // only the lexicon paths are needed here; seed may be unset
    oppscreen::ConfigDocument doc = cfg->doc;
    if (doc.get("seed").is_null()) doc.set_json("seed", 0, "cascade_load");
    const auto rc = oppscreen::resolve(doc);
    auto m = std::make_unique<oppscreen_cascade>(oppscreen_cascade{
        oppscreen::CascadeModel::load(dir),
        oppscreen::SentimentLexicons::load(rc.polarity, rc.emotion, rc.emoji, rc.adverbs)});
    *out = m.release();
  });
}

void oppscreen_cascade_free(oppscreen_cascade* model) { delete model; }

double oppscreen_cascade_depth(const oppscreen_cascade* model) { return model ? model->model.depth() : -1.0; }

oppscreen_status oppscreen_cascade_set_depth(oppscreen_cascade* model, double depth) {
  return guard([&] {
    need(model, "model");
    model->model.set_depth(depth);
  });
}

oppscreen_status oppscreen_cascade_classify(const oppscreen_cascade* model, const char* processed_json,
                                            char** decision_json) {
  return guard([&] {
    need(model, "model");
    need(processed_json, "processed_json");
    need(decision_json, "output pointer");
    *decision_json = nullptr;
    const auto row = oppscreen::processed_from_json(json::parse(processed_json));
    const auto d = model->model.classify(row.tweet, model->lexicons);
    json j{{"id", row.tweet.id},
           {"label", oppscreen::label_symbol(d.label)},
           {"confidences", d.confidence},
           {"abstained", d.abstained},
           {"abstained_layer", d.abstained_layer}};
    *decision_json = copy_out(j.dump());
  });
}

}  // extern "C"
