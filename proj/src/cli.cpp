#include "fitch/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "fitch/equiv.hpp"
#include "fitch/nbe.hpp"
#include "fitch/surface.hpp"
#include "fitch/typecheck.hpp"

namespace fitch::cli {

namespace {

using json = nlohmann::ordered_json;

json ext_json(const Ext& e) {
  json out = json::array();
  for (const auto& entry : e.suffix)
    out.push_back(entry.is_lock() ? json{{"kind", "lock"}} : json{{"kind", "var"}, {"type", to_string(entry.ty())}});
  return out;
}

json nf_json(const Nf& n);

json ne_json(const Ne& n) {
  switch (n.kind()) {
    case Ne::Kind::Var: return {{"kind", "var"}, {"index", n.index()}};
    case Ne::Kind::App: return {{"kind", "app"}, {"fun", ne_json(n.fun())}, {"arg", nf_json(n.arg())}};
    case Ne::Kind::Unbox: return {{"kind", "unbox"}, {"scrut", ne_json(n.scrut())}, {"ext", ext_json(n.ext())}};
  }
  return nullptr;
}

json nf_json(const Nf& n) {
  switch (n.kind()) {
    case Nf::Kind::Up: return {{"kind", "up"}, {"ne", ne_json(n.ne())}};
    case Nf::Kind::Lam: return {{"kind", "lam"}, {"dom", to_string(n.dom())}, {"body", nf_json(n.body())}};
    case Nf::Kind::Box: return {{"kind", "box"}, {"body", nf_json(n.body())}};
    case Nf::Kind::Nat: {
      json fs = json::array();
      for (const auto& f : n.factors()) fs.push_back(ne_json(f));
      return {{"kind", "nat"}, {"coeff", n.coeff()}, {"factors", fs}};
    }
  }
  return nullptr;
}

bool mentions_nat(const Ty& t) {
  switch (t.kind()) {
    case Ty::Kind::Nat: return true;
    case Ty::Kind::Fun: return mentions_nat(t.dom()) || mentions_nat(t.cod());
    case Ty::Kind::Box: return mentions_nat(t.body());
    case Ty::Kind::Base: return false;
  }
  return false;
}

struct Options {
  std::string command;
  std::string logic;
  std::string ext;
  std::string format = "text";
  std::string file;
};

struct Failure {
  int code;
  std::string kind;
  SourcePos pos;
  std::string message;
};

bool reports(const std::string& command, Directive::Kind k) {
  if (command == "check" || command == "run") return true;
  if (command == "norm") return k == Directive::Kind::Norm;
  return k == Directive::Kind::Eq;
}

const char* directive_name(Directive::Kind k) {
  switch (k) {
    case Directive::Kind::Check: return "check";
    case Directive::Kind::Norm: return "norm";
    case Directive::Kind::Eq: return "eq";
  }
  return "?";
}

class Session {
 public:
  Session(const Options& opts, std::ostream& out) : opts_(opts), out_(out) {}

  // Returns the failure that stopped processing, if any.
  std::optional<Failure> process(const std::string& source) {
    ProblemFile p;
    try {
      p = parse_problem(source);
    } catch (const ParseError& e) {
      return Failure{kParseError, "parse", e.pos, e.detail};
    }
    if (!opts_.logic.empty()) p.logic = *parse_flavor(opts_.logic);
    if (opts_.ext == "nat") p.nat = true;
    doc_["logic"] = std::string(to_string(p.logic));
    doc_["ext"] = p.nat ? json::array({"nat"}) : json::array();
    doc_["results"] = json::array();

    for (const auto& item : p.ctx)
      if (!p.nat && item.entry.is_var() && mentions_nat(item.entry.ty()))
        return Failure{kTypeError, "type", item.pos, "the type Nat requires 'ext nat'"};
    const Scope scope = Scope::from(p.ctx);

    for (const auto& d : p.directives) {
      try {
        handle(p.logic, p.nat, scope, d);
      } catch (const ElabError& e) {
        return Failure{kTypeError, "type", e.pos, e.detail};
      } catch (const TypeError& e) {
        return Failure{kTypeError, "type", d.pos, e.what()};
      }
    }
    return std::nullopt;
  }

  json& doc() { return doc_; }

 private:
  void handle(Flavor flavor, bool nat, const Scope& scope, const Directive& d) {
    Elaborated lhs = elaborate(flavor, nat, scope, d.lhs);
    json r{{"directive", directive_name(d.kind)}, {"line", d.pos.line}, {"type", to_string(lhs.ty)}};
    std::string text;
    switch (d.kind) {
      case Directive::Kind::Check: text = to_string(lhs.ty); break;
      case Directive::Kind::Norm: {
        if (opts_.command == "check") {
          text = to_string(lhs.ty);
          break;
        }
        Nf n = norm(flavor, scope.ctx, lhs.tm, lhs.ty);
        text = pretty(flavor, scope, n);
        r["normal_form"] = text;
        r["tree"] = nf_json(n);
        break;
      }
      case Directive::Kind::Eq: {
        Elaborated rhs = elaborate(flavor, nat, scope, *d.rhs);
        if (!(lhs.ty == rhs.ty))
          throw ElabError(d.pos, "eq: left side has type " + to_string(lhs.ty) + " but right side has type " +
                                     to_string(rhs.ty));
        if (opts_.command == "check") {
          text = to_string(lhs.ty);
          break;
        }
        const bool same = norm(flavor, scope.ctx, lhs.tm, lhs.ty) == norm(flavor, scope.ctx, rhs.tm, rhs.ty);
        text = same ? "equal" : "distinct";
        r["equal"] = same;
        break;
      }
    }
    if (!reports(opts_.command, d.kind)) return;
    if (opts_.format == "json") {
      doc_["results"].push_back(std::move(r));
    } else {
      out_ << text << '\n';
    }
  }

  const Options& opts_;
  std::ostream& out_;
  json doc_ = json::object();
};

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Normalizer and equivalence checker for Fitch-style modal lambda calculi", "fitch"};
  app.require_subcommand(1);
  Options opts;
  const std::vector<std::pair<const char*, const char*>> commands{
      {"check", "Print the type of every directive"},
      {"norm", "Print the normal form of every norm directive"},
      {"eq", "Print equal or distinct for every eq directive"},
      {"run", "Process every directive by its own kind"},
  };
  for (const auto& [name, desc] : commands) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--logic", opts.logic, "Override the logic named in the file")
        ->check(CLI::IsMember({"K", "T", "K4", "S4"}));
    sub->add_option("--ext", opts.ext, "Enable an extension")->check(CLI::IsMember({"nat"}));
    sub->add_option("--format", opts.format, "Output format")->check(CLI::IsMember({"text", "json"}));
    sub->add_option("file", opts.file, "Problem file (default: standard input)");
    sub->callback([&opts, n = std::string(name)] { opts.command = n; });
  }
  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kParseError;
  }

  std::string source;
  std::string origin = "<stdin>";
  if (opts.file.empty() || opts.file == "-") {
    std::ostringstream buf;
    buf << in.rdbuf();
    source = buf.str();
  } else {
    std::ifstream f(opts.file, std::ios::binary);
    if (!f) {
      err << "error: cannot open '" << opts.file << "'\n";
      if (opts.format == "json") out << json{{"error", {{"kind", "io"}, {"message", "cannot open '" + opts.file + "'"}}}}.dump(2) << '\n';
      return kParseError;
    }
    std::ostringstream buf;
    buf << f.rdbuf();
    source = buf.str();
    origin = opts.file;
  }

  Session session(opts, out);
  std::optional<Failure> fail = session.process(source);
  if (fail) {
    err << origin << ":" << to_string(fail->pos) << ": error: " << fail->message << '\n';
    session.doc()["error"] = {{"kind", fail->kind},
                              {"line", fail->pos.line},
                              {"col", fail->pos.col},
                              {"message", fail->message}};
  }
  if (opts.format == "json") out << session.doc().dump(2) << '\n';
  return fail ? fail->code : kOk;
}

}  // namespace fitch::cli
