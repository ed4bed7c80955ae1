#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gaitkb/analysis.hpp"
#include "gaitkb/cohort.hpp"
#include "gaitkb/error.hpp"
#include "gaitkb/service.hpp"
#include "gaitkb/store_io.hpp"
#include "gaitkb/trial_io.hpp"
#include "gaitkb/wire.hpp"

namespace fs = std::filesystem;
using namespace gaitkb;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitAnalysis = 1;
constexpr int kExitIo = 2;

// I/O and configuration problems map to exit code 2, everything else to 1.
int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::PersistenceError:
    case ErrorCode::VersionError:
    case ErrorCode::InvalidEpsilon: return kExitIo;
    default: return kExitAnalysis;
  }
}

KnowledgeStore open_store(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::PersistenceError, "store file not found: " + path.string());
  return load_store(path);
}

std::int64_t now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

char glyph(ParamState s) {
  switch (s) {
    case ParamState::InRange: return '#';
    case ParamState::OutOfRange: return 'o';
    case ParamState::NoData: return '.';
  }
  return '?';
}

void print_matches(std::ostream& out, const std::vector<MatchResult>& results) {
  double best = 0.0;
  for (const auto& r : results) best = std::max(best, r.score);
  out << "rank  category          score          used  summary           match\n";
  int rank = 1;
  for (const auto& r : results) {
    std::string summary;
    for (auto s : r.summary) summary += glyph(s);
    const int width = best > 0.0 ? static_cast<int>(20.0 * r.score / best + 0.5) : 0;
    char line[256];
    std::snprintf(line, sizeof line, "%-5d %-17s %-14.6g %-5d %s  %s\n", rank++,
                  (r.category_name + (r.manual_override ? "*" : "")).c_str(), r.score, r.n_used,
                  summary.c_str(), std::string(static_cast<std::size_t>(width), '=').c_str());
    out << line;
  }
  out << "summary: # in range, o out of range, . no data; * manual range override\n";
}

void print_tree(std::ostream& out, const KnowledgeStore& store) {
  for (const auto* c : store.categories()) {
    out << c->name << " [" << c->id << "] (" << c->patients.size() << ")"
        << (c->has_manual_override() ? " (manual override)" : "") << '\n';
    for (const auto& r : c->ranges) {
      const auto kind = stp_kind(r.stp_id);
      out << "  " << r.stp_id << ' ' << to_string(stp_foot(r.stp_id)) << ' ' << stp_name(kind) << ": ";
      if (r.bounds) {
        out << '[' << r.bounds->min << ", " << r.bounds->max << "] " << stp_unit(kind);
      } else {
        out << "no data";
      }
      out << (r.manual ? " (manual)" : "") << '\n';
    }
  }
}

std::optional<std::set<int>> parse_subset(const std::vector<int>& ids) {
  if (ids.empty()) return std::nullopt;
  return std::set<int>(ids.begin(), ids.end());
}

HttpServer* g_server = nullptr;
void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Knowledge-assisted gait analysis from vertical ground reaction forces"};
  app.require_subcommand(1);

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Rank the store's categories for one trial");
  std::string trial_path;
  std::string store_path;
  std::vector<std::string> filters;
  bool as_json = false;
  double epsilon = kDefaultEpsilon;
  double contact_fraction = SegmentationConfig{}.contact_fraction;
  analyze->add_option("trial", trial_path, "Trial file")->required();
  analyze->add_option("--store", store_path, "Knowledge store file")->required();
  analyze->add_option("--filter", filters, "Demographic filter clause, e.g. gender=female or age=30:50");
  analyze->add_flag("--json", as_json, "Emit the service's /match payload");
  analyze->add_option("--epsilon", epsilon, "Matching epsilon")->capture_default_str();
  analyze->add_option("--contact-fraction", contact_fraction, "Contact threshold in body weights")
      ->capture_default_str();

  // store
  auto* store_cmd = app.add_subcommand("store", "Manage a knowledge store file");
  store_cmd->require_subcommand(1);
  std::string category_id;
  std::string category_name;
  std::string patient_id;
  std::vector<int> subset;
  int stp = 0;
  double range_min = 0.0;
  double range_max = 0.0;
  bool force = false;

  auto* init = store_cmd->add_subcommand("init", "Create an empty store holding the norm category");
  init->add_option("--store", store_path)->required();
  init->add_flag("--force", force, "Overwrite an existing file");

  auto* add_cat = store_cmd->add_subcommand("add-category", "Add an empty pathology category");
  add_cat->add_option("--store", store_path)->required();
  add_cat->add_option("--id", category_id)->required();
  add_cat->add_option("--name", category_name)->required();

  auto* apply = store_cmd->add_subcommand("apply", "Process a trial and add the patient to a category");
  apply->add_option("--store", store_path)->required();
  apply->add_option("--category", category_id)->required();
  apply->add_option("--trial", trial_path)->required();
  apply->add_option("--subset", subset, "Only these STP ids")->delimiter(',');
  apply->add_option("--contact-fraction", contact_fraction)->capture_default_str();

  auto* remove = store_cmd->add_subcommand("remove", "Remove a patient from a category");
  remove->add_option("--store", store_path)->required();
  remove->add_option("--category", category_id)->required();
  remove->add_option("--patient", patient_id)->required();

  auto* reset = store_cmd->add_subcommand("reset", "Recompute ranges and clear manual overrides");
  reset->add_option("--store", store_path)->required();
  reset->add_option("--category", category_id)->required();

  auto* override_cmd = store_cmd->add_subcommand("override", "Set a manual range for one STP");
  override_cmd->add_option("--store", store_path)->required();
  override_cmd->add_option("--category", category_id)->required();
  override_cmd->add_option("--stp", stp)->required();
  override_cmd->add_option("--min", range_min)->required();
  override_cmd->add_option("--max", range_max)->required();

  auto* show_tree = store_cmd->add_subcommand("show-tree", "Print categories, member counts and ranges");
  show_tree->add_option("--store", store_path)->required();
  show_tree->add_flag("--json", as_json);

  // synth-cohort
  auto* synth = app.add_subcommand("synth-cohort", "Generate a synthetic store and probe trials");
  CohortConfig cohort = default_cohort_config();
  std::string out_dir;
  std::string config_path;
  synth->add_option("--config", config_path, "Cohort config file (JSON); flags override it");
  auto* norm_opt = synth->add_option("--norm", cohort.norm_count, "Norm category size")->capture_default_str();
  auto* per_opt =
      synth->add_option("--per-category", cohort.per_category, "Pathology category size")->capture_default_str();
  auto* seed_opt = synth->add_option("--seed", cohort.seed, "Random seed")->capture_default_str();
  synth->add_option("--out", out_dir, "Output directory")->required();

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  std::string listen;
  serve->add_option("--store", store_path, "Knowledge store file (env GAITKB_STORE)");
  serve->add_option("--listen", listen, "host:port (env GAITKB_LISTEN)");
  serve->add_option("--epsilon", epsilon, "Matching epsilon (env GAITKB_EPSILON)");
  serve->add_option("--contact-fraction", contact_fraction, "Contact threshold (env GAITKB_CONTACT_FRACTION)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitIo;
  }

  try {
    if (*analyze) {
      if (!fs::exists(trial_path)) throw Error(ErrorCode::PersistenceError, "trial file not found: " + trial_path);
      const auto store = open_store(store_path);
      DemographicFilter filter;
      try {
        filter = wire::parse_filter_args(filters);
      } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
      }
      SegmentationConfig seg;
      seg.contact_fraction = contact_fraction;
      const auto processed = process_trial(read_trial_file(trial_path), seg);
      const auto results = rank_categories(processed.stps, store, filter, epsilon);
      if (as_json) {
        std::cout << wire::render(wire::match_report(results, filter, epsilon));
      } else {
        std::cout << "patient " << processed.trial.patient.id << ", " << processed.left_segments.size()
                  << " left / " << processed.right_segments.size() << " right steps\n";
        print_matches(std::cout, results);
      }
      return kExitOk;
    }

    if (*store_cmd) {
      if (*init) {
        if (fs::exists(store_path) && !force) {
          std::cerr << "error: " << store_path << " exists (use --force)\n";
          return kExitIo;
        }
        save_store(KnowledgeStore{}, store_path);
        return kExitOk;
      }
      if (*show_tree) {
        const auto store = open_store(store_path);
        if (as_json) {
          std::cout << wire::render(wire::tree_to_json(store));
        } else {
          print_tree(std::cout, store);
        }
        return kExitOk;
      }
      auto store = open_store(store_path);
      if (*add_cat) {
        store = add_category(std::move(store), category_id, category_name);
      } else if (*apply) {
        SegmentationConfig seg;
        seg.contact_fraction = contact_fraction;
        if (!fs::exists(trial_path)) throw Error(ErrorCode::PersistenceError, "trial file not found: " + trial_path);
        const auto processed = process_trial(read_trial_file(trial_path), seg);
        store = apply_patient(std::move(store), category_id,
                              PatientRecord{processed.trial.patient, processed.stps, now_ms()},
                              parse_subset(subset));
      } else if (*remove) {
        store = remove_patient(std::move(store), category_id, patient_id);
      } else if (*reset) {
        store = reset_category(std::move(store), category_id);
      } else if (*override_cmd) {
        store = override_range(std::move(store), category_id, stp, range_min, range_max);
      }
      save_store(store, store_path);
      return kExitOk;
    }

    if (*synth) {
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw Error(ErrorCode::PersistenceError, "cannot open " + config_path);
        auto from_file = cohort_config_from_json(nlohmann::json::parse(in));
        if (norm_opt->count()) from_file.norm_count = cohort.norm_count;
        if (per_opt->count()) from_file.per_category = cohort.per_category;
        if (seed_opt->count()) from_file.seed = cohort.seed;
        cohort = std::move(from_file);
      }
      const fs::path out(out_dir);
      fs::create_directories(out / "trials");
      save_store(synthesize_store(cohort), out / "store.json");
      {
        std::ofstream cfg(out / "cohort-config.json", std::ios::trunc);
        cfg << cohort_config_to_json(cohort).dump(2) << '\n';
        if (!cfg) throw Error(ErrorCode::PersistenceError, "cannot write cohort-config.json");
      }
      // One probe trial per category at the profile mean.
      std::mt19937_64 rng(cohort.seed ^ 0x9e3779b97f4a7c15ULL);
      std::vector<const CategoryProfile*> profiles{&cohort.norm};
      for (const auto& p : cohort.pathologies) profiles.push_back(&p);
      for (const auto* p : profiles) {
        auto meta = sample_patient_meta(rng, cohort, "probe-" + p->id);
        write_trial_file(synthesize_trial(meta, p->mean()), out / "trials" / (p->id + "-probe.json"));
      }
      std::cout << "wrote " << (out / "store.json").string() << " and " << profiles.size() << " probe trials\n";
      return kExitOk;
    }

    if (*serve) {
      ServiceConfig config = config_from_env();
      if (!store_path.empty()) config.store_path = store_path;
      if (serve->get_option("--epsilon")->count()) config.epsilon = epsilon;
      if (serve->get_option("--contact-fraction")->count()) config.segmentation.contact_fraction = contact_fraction;
      if (!listen.empty()) {
        const auto colon = listen.rfind(':');
        config.listen_host = listen.substr(0, colon);
        if (colon != std::string::npos) config.listen_port = std::stoi(listen.substr(colon + 1));
      }
      if (!(config.epsilon > 0.0)) throw Error(ErrorCode::InvalidEpsilon, "epsilon must be > 0");
      auto service = Service::open(config);
      HttpServer server(*service);
      const int port = server.bind(config.listen_host, config.listen_port);
      if (port < 0) {
        std::cerr << "error: cannot bind " << config.listen_host << ':' << config.listen_port << '\n';
        return kExitIo;
      }
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "listening on " << config.listen_host << ':' << port << ", store "
                << config.store_path.string() << '\n';
      server.listen_after_bind();
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitAnalysis;
  }
  return kExitOk;
}
