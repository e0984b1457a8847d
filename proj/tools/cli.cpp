#include "cli.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "ontoq/classifier.hpp"
#include "ontoq/errors.hpp"
#include "ontoq/eval.hpp"
#include "ontoq/ingestion.hpp"
#include "ontoq/ir_text.hpp"
#include "ontoq/pipeline.hpp"

namespace ontoq {

using json = nlohmann::json;

int exit_code_for(const std::exception& e) {
  const auto* err = dynamic_cast<const Error*>(&e);
  if (!err) return kExitInternal;
  switch (err->code()) {
    case ErrorCode::Io:
      return kExitIo;
    case ErrorCode::UncompilableIntent:
      return kExitUncompilable;
    case ErrorCode::NoConvergence:
      return kExitInternal;
    default:
      return kExitValidation;
  }
}

namespace {

struct GlobalFlags {
  std::vector<std::string> corpus;
  std::vector<std::string> events;
  std::string lexicon;
  std::string categories;
  std::string config;
  std::string format;
  std::optional<std::int64_t> now;
  std::uint64_t seed = 42;
  bool explain = false;
  std::string report;
};

AppConfig make_config(const GlobalFlags& g) {
  AppConfig c = g.config.empty() ? AppConfig{} : AppConfig::load(g.config);
  if (!g.corpus.empty()) c.corpus_paths = g.corpus;
  if (!g.events.empty()) c.event_paths = g.events;
  if (!g.lexicon.empty()) c.lexicon_path = g.lexicon;
  if (!g.categories.empty()) c.categories_path = g.categories;
  if (!g.format.empty()) c.format = g.format;
  if (g.now) c.now = g.now;
  return c;
}

std::string counts_line(const Snapshot& s) {
  std::ostringstream os;
  os << s.graph.node_count() << " nodes, " << s.graph.edge_count() << " edges, " << s.load_report.skipped.size()
     << " skipped";
  return os.str();
}

void print_load_details(const Snapshot& s, std::ostream& out) {
  for (const auto& sk : s.load_report.skipped) out << "  skipped line " << sk.line << ": " << sk.reason << '\n';
  for (const auto& d : s.load_report.dropped_edges)
    out << "  dropped edge line " << d.line << ": " << d.src << " -[" << d.rel << "]-> " << d.dst << " (" << d.reason
        << ")\n";
  if (s.event_report.applied || !s.event_report.noops.empty())
    out << "  events: " << s.event_report.applied << " applied, " << s.event_report.noops.size() << " no-op\n";
}

void require_graph(const Pipeline& p) {
  if (p.snapshot()->graph.node_count() == 0) throw InvalidConfig("no graph loaded; pass --corpus");
}

void print_answer(const Pipeline& p, const QueryIntent* intent, const Answer& a, bool explain, const std::string& format,
                  std::ostream& out) {
  if (explain) {
    if (intent) out << "-- intent\n" << describe_intent(*intent);
    out << "-- ir\n" << print_ir(a.ir) << "\n-- answer\n";
  }
  out << p.render(a, format);
}

void print_uncompilable(const UncompilableIntent& e, std::ostream& err) {
  err << "error: " << e.what() << '\n';
  if (!e.residual_terms().empty()) {
    err << "residual terms:";
    for (const auto& t : e.residual_terms()) err << ' ' << t;
    err << '\n';
  }
}

// ---------------------------------------------------------------- commands

int cmd_ingest(const GlobalFlags& g, const std::string& snapshot_path, std::ostream& out) {
  Pipeline p(make_config(g));
  p.load();
  const auto snap = p.snapshot();
  out << counts_line(*snap) << '\n';
  print_load_details(*snap, out);
  if (!snapshot_path.empty()) {
    std::ofstream f(snapshot_path);
    if (!f) throw IoError("cannot write snapshot: " + snapshot_path);
    write_corpus(snap->graph, f);
    out << "snapshot written to " << snapshot_path << '\n';
  }
  const auto problems = snap->graph.validate();
  if (!problems.empty()) {
    for (const auto& pr : problems) out << "  invalid: " << pr.subject << ": " << pr.detail << '\n';
    return kExitValidation;
  }
  return kExitOk;
}

int cmd_index(const GlobalFlags& g, std::ostream& out) {
  Pipeline p(make_config(g));
  p.load();
  const auto snap = p.snapshot();
  out << snap->matrix.doc_count() << " documents, " << snap->matrix.term_count() << " terms, rank "
      << snap->model.rank << '\n';
  if (!snap->model.singular_values.empty()) {
    out << "singular values:";
    const std::size_t shown = std::min<std::size_t>(8, snap->model.singular_values.size());
    for (std::size_t i = 0; i < shown; ++i) out << ' ' << std::setprecision(6) << snap->model.singular_values[i];
    if (shown < snap->model.singular_values.size()) out << " ...";
    out << '\n';
  }
  return kExitOk;
}

int cmd_query(const GlobalFlags& g, const std::vector<std::string>& words, const std::string& ir,
              std::ostream& out) {
  Pipeline p(make_config(g));
  p.load();
  require_graph(p);
  const std::string format = p.config().format;
  if (!ir.empty()) {
    print_answer(p, nullptr, p.ask_ir(ir), g.explain, format, out);
    return kExitOk;
  }
  std::string text;
  for (const auto& w : words) text += (text.empty() ? "" : " ") + w;
  const QueryOutcome o = p.ask(text);
  print_answer(p, &o.intent, o.answer, g.explain, format, out);
  return kExitOk;
}

int cmd_repl(const GlobalFlags& g, CliStreams io) {
  AppConfig config = make_config(g);
  Pipeline p(config);
  if (!config.corpus_paths.empty()) {
    p.load();
    io.out << counts_line(*p.snapshot()) << '\n';
  }
  bool explain = g.explain;
  std::string format = p.config().format;
  std::string line;
  auto prompt = [&] {
    if (io.interactive) io.out << "ontoq> " << std::flush;
  };
  prompt();
  while (std::getline(io.in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) {
      prompt();
      continue;
    }
    line = line.substr(first);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    try {
      if (line[0] == ':') {
        const auto sp = line.find(' ');
        const std::string cmd = line.substr(0, sp);
        const std::string arg = sp == std::string::npos ? "" : line.substr(line.find_first_not_of(' ', sp));
        if (cmd == ":quit" || cmd == ":q") return kExitOk;
        if (cmd == ":help") {
          io.out << ":ingest <file>  load a corpus\n:index  rebuild the semantic index\n:explain on|off\n"
                    ":format table|json|csv\n:ir <query>  run an IR query\n:quit\n";
        } else if (cmd == ":ingest") {
          std::ifstream f(arg);
          if (!f) throw IoError("cannot open corpus file: " + arg);
          p.ingest(f);
          io.out << counts_line(*p.snapshot()) << '\n';
        } else if (cmd == ":index") {
          const auto s = p.snapshot();
          p.publish(s->graph, s->load_report, s->event_report);
          io.out << p.snapshot()->matrix.doc_count() << " documents indexed, rank " << p.snapshot()->model.rank
                 << '\n';
        } else if (cmd == ":explain") {
          if (arg != "on" && arg != "off") throw InvalidConfig("usage: :explain on|off");
          explain = arg == "on";
        } else if (cmd == ":format") {
          if (arg != "table" && arg != "json" && arg != "csv") throw InvalidConfig("usage: :format table|json|csv");
          format = arg;
        } else if (cmd == ":ir") {
          print_answer(p, nullptr, p.ask_ir(arg), explain, format, io.out);
        } else {
          throw InvalidConfig("unknown command " + cmd + " (try :help)");
        }
      } else {
        const QueryOutcome o = p.ask(line);
        print_answer(p, &o.intent, o.answer, explain, format, io.out);
      }
    } catch (const UncompilableIntent& e) {
      print_uncompilable(e, io.err);
    } catch (const std::exception& e) {
      io.err << "error: " << e.what() << '\n';
    }
    prompt();
  }
  return kExitOk;
}

int cmd_classify(const GlobalFlags& g, std::ostream& out) {
  const AppConfig config = make_config(g);
  config.validate();
  if (config.corpus_paths.empty()) throw InvalidConfig("classify needs --corpus");
  const CategoryLexicon lexicon = CategoryLexicon::load(config.resolved_categories());
  json rows = json::array();
  std::vector<std::vector<std::string>> table;
  for (const auto& path : config.corpus_paths) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open corpus file: " + path);
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
      ++n;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      ResourceDocument doc;
      try {
        doc = parse_document(line);
      } catch (const std::exception& e) {
        throw InvalidConfig(path + " line " + std::to_string(n) + ": " + e.what());
      }
      if (doc.kind != "Service") continue;
      const ServiceCategory c = classify_service(doc, lexicon);
      std::string features;
      for (const auto& f : c.matched_features) features += (features.empty() ? "" : ", ") + f;
      std::ostringstream score;
      score << std::fixed << std::setprecision(3) << c.score;
      table.push_back({doc.id, c.label, score.str(), features});
      rows.push_back({{"id", doc.id}, {"category", c.label}, {"score", c.score}, {"matched", c.matched_features}});
    }
  }
  if (config.format == "json") {
    out << rows.dump(2) << '\n';
    return kExitOk;
  }
  std::vector<std::string> header = {"Service", "Category", "Score", "Matched"};
  if (config.format == "csv") {
    out << "Service,Category,Score,Matched\r\n";
    for (const auto& r : table) out << r[0] << ',' << r[1] << ',' << r[2] << ",\"" << r[3] << "\"\r\n";
    return kExitOk;
  }
  std::vector<std::size_t> w(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) {
    w[i] = header[i].size();
    for (const auto& r : table) w[i] = std::max(w[i], r[i].size());
  }
  auto emit = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      out << r[i];
      if (i + 1 < r.size()) out << std::string(w[i] - r[i].size() + 2, ' ');
    }
    out << '\n';
  };
  emit(header);
  for (const auto& r : table) emit(r);
  return kExitOk;
}

int cmd_eval(const GlobalFlags& g, const std::string& gold_path, bool no_timing, std::ostream& out) {
  AppConfig config = make_config(g);
  const bool generated = config.corpus_paths.empty();
  std::optional<GeneratedCorpus> gen;
  if (generated) {
    GenParams params;
    params.seed = g.seed;
    gen = generate_corpus(params);
    if (!config.now) config.now = params.now;
  }
  Pipeline p(config);
  if (generated) {
    std::istringstream in(gen->corpus);
    p.ingest(in);
  } else {
    p.load();
  }
  std::vector<GoldQuery> gold;
  if (!gold_path.empty()) gold = load_gold(gold_path);
  else if (generated) gold = gen->gold;
  else throw InvalidConfig("eval over --corpus needs --gold");

  const Clock clock = no_timing ? Clock([] { return 0.0; }) : steady_clock_ms();
  const ComparisonReport report = run_comparison(p, gold, clock);
  out << render_report(report);
  if (!g.report.empty()) {
    std::ofstream f(g.report);
    if (!f) throw IoError("cannot write report: " + g.report);
    f << report_json(report);
    out << "report written to " << g.report << '\n';
  }
  return kExitOk;
}

int cmd_generate(const GlobalFlags& g, std::size_t nodes, const std::string& corpus_out, const std::string& gold_out,
                 std::ostream& out) {
  GenParams params = nodes ? GenParams::for_size(nodes, g.seed) : GenParams{};
  params.seed = g.seed;
  const GeneratedCorpus gen = generate_corpus(params);
  auto write = [](const std::string& path, auto&& fn) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot write " + path);
    fn(f);
  };
  write(corpus_out, [&](std::ostream& f) { f << gen.corpus; });
  write(gold_out, [&](std::ostream& f) { write_gold(gen.gold, f); });
  out << gen.nodes << " nodes, " << gen.edges << " edges, " << gen.gold.size() << " gold queries (seed " << params.seed
      << ")\n"
      << "corpus: " << corpus_out << "\ngold: " << gold_out << '\n';
  return kExitOk;
}

json error_body(const std::exception& e) {
  json j{{"error", e.what()}};
  if (const auto* u = dynamic_cast<const UncompilableIntent*>(&e)) j["residual"] = u->residual_terms();
  return j;
}

int cmd_serve(const GlobalFlags& g, const std::string& host, int port, std::ostream& out) {
  Pipeline p(make_config(g));
  p.load();
  httplib::Server server;
  install_routes(server, p);
  if (!server.bind_to_port(host, port)) throw IoError("cannot bind " + host + ":" + std::to_string(port));
  out << "listening on http://" << host << ':' << port << '\n' << std::flush;
  server.listen_after_bind();
  return kExitOk;
}

}  // namespace

void install_routes(httplib::Server& server, Pipeline& pipeline) {
  static std::mutex write_mu;
  auto send = [](httplib::Response& res, int status, const std::string& body) {
    res.status = status;
    res.set_content(body, "application/json");
  };
  server.Get("/healthz", [&pipeline, send](const httplib::Request&, httplib::Response& res) {
    const auto s = pipeline.snapshot();
    send(res, 200,
         json{{"status", "ok"}, {"nodes", s->graph.node_count()}, {"edges", s->graph.edge_count()}}.dump() + "\n");
  });
  server.Post("/query", [&pipeline, send](const httplib::Request& req, httplib::Response& res) {
    try {
      json body;
      try {
        body = json::parse(req.body);
      } catch (const json::exception&) {
        throw InvalidConfig("request body must be JSON");
      }
      if (!body.is_object()) throw InvalidConfig("request body must be a JSON object");
      if (body.contains("ir")) {
        send(res, 200, render_json(pipeline.ask_ir(body.at("ir").get<std::string>())));
      } else if (body.contains("text") && body.at("text").is_string()) {
        const auto snap = pipeline.snapshot();
        const Timestamp now = body.contains("now") ? Timestamp{body.at("now").get<std::int64_t>()} : pipeline.now();
        send(res, 200, render_json(pipeline.ask(body.at("text").get<std::string>(), *snap, now).answer));
      } else {
        throw InvalidConfig("request needs \"text\" or \"ir\"");
      }
    } catch (const std::exception& e) {
      const int code = exit_code_for(e);
      send(res, code == kExitInternal ? 500 : 400, error_body(e).dump() + "\n");
    }
  });
  server.Post("/ingest", [&pipeline, send](const httplib::Request& req, httplib::Response& res) {
    try {
      std::lock_guard<std::mutex> lock(write_mu);
      std::istringstream in(req.body);
      const LoadReport r = pipeline.ingest(in);
      const auto s = pipeline.snapshot();
      send(res, 200,
           json{{"nodes", s->graph.node_count()},
                {"edges", s->graph.edge_count()},
                {"skipped", r.skipped.size()},
                {"dropped_edges", r.dropped_edges.size()}}
                   .dump() +
               "\n");
    } catch (const std::exception& e) {
      send(res, exit_code_for(e) == kExitInternal ? 500 : 400, error_body(e).dump() + "\n");
    }
  });
}

int run_cli(const std::vector<std::string>& args, CliStreams io) {
  CLI::App app{"Natural-language search over a cloud resource knowledge graph", "ontoq"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  app.add_option("--corpus", g.corpus, "Corpus file(s), JSON lines; repeat or comma-separate")
      ->allow_extra_args(false)
      ->delimiter(',');
  app.add_option("--events", g.events, "Change-event file(s) applied after the corpus")
      ->allow_extra_args(false)
      ->delimiter(',');
  app.add_option("--lexicon", g.lexicon, "Query lexicon JSON");
  app.add_option("--categories", g.categories, "Service category lexicon JSON");
  app.add_option("--config", g.config, "JSON config file");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"table", "json", "csv"}));
  app.add_option("--now", g.now, "Clock for temporal queries, epoch seconds");
  app.add_option("--seed", g.seed, "Generator seed");
  app.add_flag("--explain", g.explain, "Print the extracted intent and IR");
  app.add_option("--report", g.report, "Write the JSON evaluation report here");

  std::string snapshot_path;
  auto* ingest = app.add_subcommand("ingest", "Load a corpus and print counts");
  ingest->add_option("--snapshot", snapshot_path, "Write the normalized corpus here");

  auto* index = app.add_subcommand("index", "Build the semantic index and print its shape");

  std::vector<std::string> words;
  std::string ir;
  auto* query = app.add_subcommand("query", "Answer one question");
  query->add_option("text", words, "Question text");
  query->add_option("--ir", ir, "Query in the IR syntax, bypassing language processing");

  auto* repl = app.add_subcommand("repl", "Interactive query loop");
  auto* classify = app.add_subcommand("classify", "Categorize the services in the corpus");

  std::string gold_path;
  bool no_timing = false;
  auto* eval = app.add_subcommand("eval", "Compare ontology search with keyword search");
  eval->add_option("--gold", gold_path, "Gold file, JSON lines (default: generated with --seed)");
  eval->add_flag("--no-timing", no_timing, "Report zero timings so output is reproducible");

  std::size_t nodes = 0;
  std::string corpus_out = "generated_corpus.jsonl", gold_out = "generated_gold.jsonl";
  auto* generate = app.add_subcommand("generate", "Write a synthetic corpus and its gold queries");
  generate->add_option("--nodes", nodes, "Approximate node count (default: the standard evaluation corpus)");
  generate->add_option("--out", corpus_out, "Corpus output path");
  generate->add_option("--gold-out", gold_out, "Gold output path");

  std::string host = "127.0.0.1";
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "Local HTTP endpoint");
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, io.out, io.err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*ingest) return cmd_ingest(g, snapshot_path, io.out);
    if (*index) return cmd_index(g, io.out);
    if (*query) {
      if (words.empty() && ir.empty()) throw InvalidConfig("query needs text or --ir");
      return cmd_query(g, words, ir, io.out);
    }
    if (*repl) return cmd_repl(g, io);
    if (*classify) return cmd_classify(g, io.out);
    if (*eval) return cmd_eval(g, gold_path, no_timing, io.out);
    if (*generate) return cmd_generate(g, nodes, corpus_out, gold_out, io.out);
    if (*serve) return cmd_serve(g, host, port, io.out);
  } catch (const UncompilableIntent& e) {
    print_uncompilable(e, io.err);
    return kExitUncompilable;
  } catch (const std::exception& e) {
    io.err << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kExitInternal;
}

}  // namespace ontoq
