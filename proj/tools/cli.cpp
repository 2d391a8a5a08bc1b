#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include "jcave/profile_store.hpp"
#include "jcave/server.hpp"
#include "jcave/session.hpp"
#include "jcave/synth.hpp"

namespace jcave::cli {

namespace {

using nlohmann::json;

// Errors carrying the exit class they map to.
struct Failure {
  int code;
  std::string message;
};

[[noreturn]] void fail(int code, std::string message) { throw Failure{code, std::move(message)}; }

struct RecognizerArgs {
  std::string exercise = "elbow";
  std::string arm = "right";
  std::optional<int> window;
  std::optional<int> grace;
  std::optional<double> carrying_angle;
  std::optional<double> k;

  void add_to(CLI::App& app) {
    app.add_option("--exercise", exercise, "elbow or shoulder")->check(CLI::IsMember({"elbow", "shoulder"}));
    app.add_option("--arm", arm, "left or right")->check(CLI::IsMember({"left", "right"}));
    app.add_option("--window", window, "frames allowed per segment");
    app.add_option("--grace", grace, "consecutive invalid frames tolerated");
    app.add_option("--carrying-angle", carrying_angle, "carrying angle in degrees");
    app.add_option("--k", k, "overhead allowance above the shoulder, metres");
  }

  RecognizerConfig config() const {
    RecognizerConfig c;
    c.exercise = parse_exercise(exercise);
    c.arm = parse_arm(arm);
    if (window) c.consts.window_size = *window;
    if (grace) c.consts.grace_frames = *grace;
    if (carrying_angle) c.consts.carrying_angle_deg = *carrying_angle;
    if (k) c.consts.k_offset = *k;
    try {
      c.consts.validate();
    } catch (const std::exception& e) {
      fail(kExitUsage, e.what());
    }
    return c;
  }
};

std::size_t parse_index(std::string_view text, const std::string& what) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    fail(kExitUsage, "bad number '" + std::string(text) + "' in " + what);
  }
  return v;
}

double parse_real(std::string_view text, const std::string& what) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    fail(kExitUsage, "bad number '" + std::string(text) + "' in " + what);
  }
  return v;
}

// too-wide-x:FIRST-LAST, overhead:FIRST-LAST, stall:SECONDS[@REP]
Defect parse_defect(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) {
    fail(kExitUsage, "defect '" + text + "' needs KIND:ARGS");
  }
  auto kind = text.substr(0, colon);
  auto arg = std::string_view(text).substr(colon + 1);
  if (kind == "stall") {
    int rep = 0;
    if (auto at = arg.find('@'); at != std::string_view::npos) {
      rep = static_cast<int>(parse_index(arg.substr(at + 1), text));
      arg = arg.substr(0, at);
    }
    return Defect::stall_in_up(parse_real(arg, text), rep);
  }
  auto dash = arg.find('-');
  if (dash == std::string_view::npos) {
    fail(kExitUsage, "defect '" + text + "' needs a FIRST-LAST frame range");
  }
  auto first = parse_index(arg.substr(0, dash), text);
  auto last = parse_index(arg.substr(dash + 1), text);
  if (kind == "too-wide-x") return Defect::too_wide_x(first, last);
  if (kind == "overhead") return Defect::overhead_beyond_k(first, last);
  fail(kExitUsage, "unknown defect kind '" + kind + "'");
}

struct SynthArgs {
  std::vector<double> segments{0.5, 1.5, 1.27};
  int reps = 1;
  double fps = 30.0;
  double noise = 0.0;
  std::uint64_t seed = 0;
  double upper_arm = 0.28;
  double forearm = 0.25;
  std::vector<std::string> defects;

  void add_to(CLI::App& app) {
    app.add_option("--segments", segments, "down-hold,up,down-return seconds")
        ->delimiter(',')
        ->expected(3);
    app.add_option("--reps", reps, "number of repetitions");
    app.add_option("--fps", fps, "frames per second");
    app.add_option("--noise", noise, "uniform jitter amplitude, metres");
    app.add_option("--synth-seed", seed, "seed for the jitter");
    app.add_option("--upper-arm", upper_arm, "upper arm length, metres");
    app.add_option("--forearm", forearm, "forearm length, metres");
    app.add_option("--defect", defects, "too-wide-x:A-B, overhead:A-B or stall:SECONDS[@REP]");
  }

  SynthSpec spec(const RecognizerConfig& rc) const {
    SynthSpec s;
    s.exercise = rc.exercise;
    s.arm = rc.arm;
    s.fps = fps;
    std::copy(segments.begin(), segments.end(), s.segment_durations.begin());
    s.repetitions = reps;
    s.body = {upper_arm, forearm};
    s.noise_amp = noise;
    s.seed = seed;
    for (const auto& d : defects) {
      s.defects.push_back(parse_defect(d));
    }
    try {
      s.validate();
    } catch (const std::exception& e) {
      fail(kExitUsage, e.what());
    }
    return s;
  }
};

std::vector<SkeletonFrame> load_stream(const std::string& path) {
  try {
    return read_stream_file(path);
  } catch (const StreamError& e) {
    fail(kExitParse, path + ": " + e.what());
  } catch (const std::ios_base::failure& e) {
    fail(kExitIo, e.what());
  }
}

void print_report(const json& report, const std::string& format, std::ostream& out) {
  if (format == "machine") {
    out << report.dump(2) << "\n";
  } else {
    out << render_text(report);
  }
}

std::shared_ptr<ProfileStore> open_store(const std::string& path) { return std::make_shared<ProfileStore>(path); }

void print_profile(const Profile& p, const std::string& format, std::ostream& out) {
  if (format == "machine") {
    out << profile_to_json(p).dump(2) << "\n";
    return;
  }
  out << p.id << "  " << p.name << "  age " << p.age << "  " << to_string(p.exercise) << "/" << to_string(p.arm)
      << "  N " << p.repetitions_n << "  progress " << (p.progress ? p.progress->to_string() : "-") << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rehabilitation exergame tools: recognition, headless sessions, fixtures, profiles, service", "jcave"};
  app.require_subcommand(1);
  std::string format = "text";
  app.add_option("--format", format, "text or machine")->check(CLI::IsMember({"text", "machine"}));

  // recognize
  auto* recognize = app.add_subcommand("recognize", "count repetitions in a skeleton stream");
  RecognizerArgs rec_args;
  std::string rec_stream;
  rec_args.add_to(*recognize);
  recognize->add_option("stream", rec_stream, "skeleton stream file")->required();
  recognize->add_option("--format", format, "text or machine")->check(CLI::IsMember({"text", "machine"}));

  // simulate
  auto* simulate = app.add_subcommand("simulate", "play a full session headlessly");
  RecognizerArgs sim_args;
  SynthArgs sim_synth;
  std::string sim_stream;
  std::string sim_profile;
  std::string sim_store = "profiles.json";
  std::optional<int> sim_n;
  std::uint64_t sim_seed = 0;
  std::string sim_sublevel;
  bool no_save = false;
  sim_args.add_to(*simulate);
  sim_synth.add_to(*simulate);
  simulate->add_option("--stream", sim_stream, "skeleton stream file; synthesized when omitted");
  simulate->add_option("--profile", sim_profile, "profile id to play as");
  simulate->add_option("--store", sim_store, "profile store file");
  simulate->add_option("--n", sim_n, "exercises required (N)");
  simulate->add_option("--seed", sim_seed, "session seed for level-2 layouts");
  simulate->add_option("--sublevel", sim_sublevel, "starting sub-level, e.g. 1-3");
  simulate->add_flag("--no-save", no_save, "do not record profile progress");
  simulate->add_option("--format", format, "text or machine")->check(CLI::IsMember({"text", "machine"}));

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic skeleton stream");
  RecognizerArgs syn_args;
  SynthArgs syn_synth;
  std::string syn_out;
  syn_args.add_to(*synth);
  syn_synth.add_to(*synth);
  synth->add_option("-o,--out", syn_out, "output file; stdout when omitted");

  // profiles
  auto* profiles = app.add_subcommand("profiles", "manage player profiles");
  profiles->require_subcommand(1);
  std::string store_path = "profiles.json";
  profiles->add_option("--store", store_path, "profile store file");
  profiles->add_option("--format", format, "text or machine")->check(CLI::IsMember({"text", "machine"}));

  auto* p_create = profiles->add_subcommand("create", "add a profile");
  std::string c_name, c_id, c_exercise = "elbow", c_arm = "right";
  int c_age = 0, c_n = 5;
  p_create->add_option("--name", c_name)->required();
  p_create->add_option("--age", c_age);
  p_create->add_option("--exercise", c_exercise)->check(CLI::IsMember({"elbow", "shoulder"}));
  p_create->add_option("--arm", c_arm)->check(CLI::IsMember({"left", "right"}));
  p_create->add_option("--n", c_n);
  p_create->add_option("--id", c_id, "explicit id");

  auto* p_list = profiles->add_subcommand("list", "list profiles");
  auto* p_show = profiles->add_subcommand("show", "print one profile");
  std::string target_id;
  p_show->add_option("id", target_id)->required();

  auto* p_update = profiles->add_subcommand("update", "change profile fields");
  std::optional<std::string> u_name, u_exercise, u_arm, u_progress;
  std::optional<int> u_age, u_n;
  p_update->add_option("id", target_id)->required();
  p_update->add_option("--name", u_name);
  p_update->add_option("--age", u_age);
  p_update->add_option("--exercise", u_exercise)->check(CLI::IsMember({"elbow", "shoulder"}));
  p_update->add_option("--arm", u_arm)->check(CLI::IsMember({"left", "right"}));
  p_update->add_option("--n", u_n);
  p_update->add_option("--progress", u_progress, "highest completed sub-level");

  auto* p_delete = profiles->add_subcommand("delete", "remove a profile");
  p_delete->add_option("id", target_id)->required();

  // serve
  auto* serve = app.add_subcommand("serve", "run the session service");
  std::string bind = "127.0.0.1:8765";
  std::string serve_store;
  std::string static_dir;
  serve->add_option("--bind", bind, "address:port to listen on");
  serve->add_option("--store", serve_store, "profile store file");
  serve->add_option("--static-dir", static_dir, "directory served at /");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*recognize) {
      auto config = rec_args.config();
      auto frames = load_stream(rec_stream);
      print_report(recognize_report(config, frames), format, out);
      return kExitOk;
    }

    if (*simulate) {
      SessionConfig config;
      config.recognizer = sim_args.config();
      config.session_seed = sim_seed;
      std::shared_ptr<ProfileStore> store;
      if (!sim_profile.empty()) {
        store = open_store(sim_store);
        Profile p;
        try {
          p = store->get(sim_profile);
        } catch (const UnknownProfile& e) {
          fail(kExitSession, e.what());
        }
        config.profile_id = p.id;
        config.recognizer.exercise = p.exercise;
        config.recognizer.arm = p.arm;
        config.repetitions_n = p.repetitions_n;
        config.start = resume_sublevel(p);
      }
      if (sim_n) config.repetitions_n = *sim_n;
      if (!sim_sublevel.empty()) {
        try {
          config.start = SubLevelId::parse(sim_sublevel);
        } catch (const std::exception& e) {
          fail(kExitUsage, e.what());
        }
      }

      std::vector<SkeletonFrame> frames;
      if (!sim_stream.empty()) {
        frames = load_stream(sim_stream);
      } else {
        frames = synthesize(sim_synth.spec(config.recognizer));
      }

      std::optional<SessionDriver> driver;
      try {
        driver.emplace(config);
      } catch (const std::exception& e) {
        fail(kExitSession, e.what());
      }
      for (const auto& f : frames) {
        driver->process_frame(f);
      }
      driver->settle();
      if (store && !no_save) {
        if (auto done = driver->highest_completed()) {
          store->record_progress(config.profile_id, *done);
        }
      }
      print_report(driver->report(), format, out);
      return kExitOk;
    }

    if (*synth) {
      auto spec = syn_synth.spec(syn_args.config());
      auto frames = synthesize(spec);
      if (syn_out.empty()) {
        out << serialize_stream(frames);
      } else {
        write_stream_file(syn_out, frames);
      }
      return kExitOk;
    }

    if (*profiles) {
      auto store = open_store(store_path);
      if (*p_create) {
        ProfileFields fields{c_name, c_age, parse_exercise(c_exercise), parse_arm(c_arm), c_n};
        std::optional<std::string> id;
        if (!c_id.empty()) id = c_id;
        try {
          print_profile(store->create(fields, id), format, out);
        } catch (const std::invalid_argument& e) {
          fail(kExitUsage, e.what());
        }
      } else if (*p_list) {
        auto all = store->list();
        if (format == "machine") {
          json arr = json::array();
          for (const auto& p : all) arr.push_back(profile_to_json(p));
          out << arr.dump(2) << "\n";
        } else {
          for (const auto& p : all) print_profile(p, format, out);
        }
      } else if (*p_show) {
        print_profile(store->get(target_id), format, out);
      } else if (*p_update) {
        ProfilePatch patch;
        patch.name = u_name;
        patch.age = u_age;
        patch.repetitions_n = u_n;
        try {
          if (u_exercise) patch.exercise = parse_exercise(*u_exercise);
          if (u_arm) patch.arm = parse_arm(*u_arm);
          if (u_progress) patch.progress = SubLevelId::parse(*u_progress);
        } catch (const std::exception& e) {
          fail(kExitUsage, e.what());
        }
        try {
          print_profile(store->update(target_id, patch), format, out);
        } catch (const std::invalid_argument& e) {
          fail(kExitUsage, e.what());
        }
      } else if (*p_delete) {
        store->remove(target_id);
      }
      return kExitOk;
    }

    if (*serve) {
      ServerOptions options;
      try {
        std::tie(options.address, options.port) = parse_bind_address(bind);
      } catch (const std::invalid_argument& e) {
        fail(kExitUsage, e.what());
      }
      options.static_dir = static_dir;
      if (!serve_store.empty()) options.store = open_store(serve_store);
      Server server(options);
      out << "listening on " << options.address << ":" << server.port() << std::endl;
      server.run();
      return kExitOk;
    }
  } catch (const Failure& f) {
    err << "jcave: " << f.message << "\n";
    return f.code;
  } catch (const UnknownProfile& e) {
    err << "jcave: " << e.what() << "\n";
    return kExitSession;
  } catch (const StoreFormatError& e) {
    err << "jcave: " << e.what() << "\n";
    return kExitParse;
  } catch (const StreamError& e) {
    err << "jcave: " << e.what() << "\n";
    return kExitParse;
  } catch (const BindError& e) {
    err << "jcave: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::ios_base::failure& e) {
    err << "jcave: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "jcave: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "jcave: " << e.what() << "\n";
    return kExitSession;
  }
  return kExitUsage;
}

}  // namespace jcave::cli
