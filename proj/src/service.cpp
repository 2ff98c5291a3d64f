#include "litgrid/service.hpp"
#include "litgrid/error.hpp"
#include "litgrid/json_io.hpp"
#include "litgrid/weave.hpp"

#include <httplib.h>

#include <charconv>

namespace litgrid {

Session::Session(Document doc, std::optional<Library> library)
    : current_(std::make_shared<const Document>(std::move(doc))), library_(std::move(library)) {}

std::shared_ptr<const Document> Session::snapshot() const {
    std::lock_guard lock(mu_);
    return current_;
}

std::shared_ptr<const Document> Session::set_current(Document doc) {
    auto next = std::make_shared<const Document>(std::move(doc));
    std::lock_guard lock(mu_);
    current_ = next;
    return next;
}

Session::BatchOutcome Session::apply_edit_batch(std::int64_t base_revision, const std::vector<Edit>& edits) {
    std::lock_guard write(write_mu_);
    auto doc = snapshot();
    if (base_revision != doc->revision)
        return {true, doc->revision};
    if (edits.empty())
        throw Error(ErrorCode::BadEdit, "edit batch is empty");
    auto next = set_current(apply_edits(*doc, edits));
    return {false, next->revision};
}

std::shared_ptr<const EvalResult> Session::values_for(const std::shared_ptr<const Document>& doc) const {
    {
        std::lock_guard lock(mu_);
        if (cache_ && cache_revision_ == doc->revision)
            return cache_;
    }
    auto result = std::make_shared<const EvalResult>(evaluate_checked(*doc));
    ++evaluations_;
    std::lock_guard lock(mu_);
    if (doc->revision >= cache_revision_) {
        cache_ = result;
        cache_revision_ = doc->revision;
    }
    return result;
}

std::shared_ptr<const EvalResult> Session::values() const { return values_for(snapshot()); }

Session::StubOutcome Session::stubs(bool apply) {
    std::lock_guard write(write_mu_);
    auto doc = snapshot();
    auto res = generate_stubs(*doc);
    StubOutcome out{res.stubs, doc->revision};
    if (apply && !res.stubs.empty())
        out.revision = set_current(std::move(res.doc))->revision;
    return out;
}

std::vector<Suggestion> Session::suggest(std::string_view query, std::size_t k) const {
    if (library_)
        return suggest_reuse(query, *library_, k);
    Library lib;
    lib.add("", *snapshot());
    return suggest_reuse(query, lib, k);
}

namespace {

HttpResponse json_response(int status, const Json& j) { return {status, dump_json(j), "application/json"}; }

HttpResponse error_response(int status, const std::string& message) {
    return json_response(status, {{"error", message}});
}

std::string query_or(const std::map<std::string, std::string>& q, const std::string& key, std::string fallback) {
    auto it = q.find(key);
    return it == q.end() ? fallback : it->second;
}

} // namespace

HttpResponse Session::handle(std::string_view method, std::string_view path,
                             const std::map<std::string, std::string>& query, std::string_view body) {
    const bool get = method == "GET";
    const bool post = method == "POST";
    auto wrong_method = [&] { return error_response(405, "method not allowed"); };

    try {
        if (path == "/" || path == "/index.html") {
            if (!get)
                return wrong_method();
            return {200, std::string(index_page()), "text/html; charset=utf-8"};
        }
        if (path == "/api/doc") {
            if (!get)
                return wrong_method();
            auto doc = snapshot();
            Json j = document_to_json(*doc);
            j["themes"] = theme_names(*doc);
            j["diagnostics"] = diagnostics_to_json(validate_document(*doc));
            return json_response(200, j);
        }
        if (path == "/api/edits") {
            if (!post)
                return wrong_method();
            Json j = Json::parse(body, nullptr, false);
            if (j.is_discarded() || !j.is_object())
                return error_response(400, "body must be a JSON object");
            if (!j.contains("base_revision") || !j["base_revision"].is_number_integer())
                return error_response(400, "missing integer base_revision");
            if (!j.contains("edits") || !j["edits"].is_array() || j["edits"].empty())
                return error_response(400, "edits must be a non-empty array");
            std::vector<Edit> edits;
            for (const auto& e : j["edits"])
                edits.push_back(edit_from_json(e));
            auto outcome = apply_edit_batch(j["base_revision"].get<std::int64_t>(), edits);
            if (outcome.conflict)
                return json_response(409, {{"error", "revision conflict"}, {"revision", outcome.revision}});
            return json_response(200, {{"revision", outcome.revision}});
        }
        if (path == "/api/values") {
            if (!get)
                return wrong_method();
            return {200, values_to_json(*values()), "application/json"};
        }
        if (path == "/api/view" || path == "/api/toc" || path == "/api/index") {
            if (!get)
                return wrong_method();
            auto doc = snapshot();
            std::string theme = query_or(query, "theme", std::string(kAllTheme));
            try {
                if (path == "/api/toc")
                    return json_response(200, toc_to_json(toc(*doc, theme)));
                if (path == "/api/index")
                    return json_response(200, {{"xrefs", cross_refs_to_json(cross_refs(*doc))},
                                               {"terms", term_index_to_json(term_index(*doc))}});
                Json j = render_tree_to_json(weave(*doc, theme, *values_for(doc)));
                j["revision"] = doc->revision;
                return json_response(200, j);
            } catch (const Error& e) {
                if (e.code() == ErrorCode::UnknownTheme)
                    return error_response(404, e.what());
                throw;
            }
        }
        if (path == "/api/stubs") {
            if (!post)
                return wrong_method();
            std::string apply = query_or(query, "apply", "false");
            if (apply != "true" && apply != "false")
                return error_response(400, "apply must be true or false");
            auto outcome = stubs(apply == "true");
            Json list = Json::array();
            for (const auto& s : outcome.stubs)
                list.push_back({{"target", s.target}, {"inserted", s.inserted}});
            Json j = {{"stubs", list}, {"revision", outcome.revision}};
            j["applied"] = apply == "true" && !outcome.stubs.empty();
            return json_response(200, j);
        }
        if (path == "/api/suggest") {
            if (!get)
                return wrong_method();
            std::string k_text = query_or(query, "k", "5");
            int k = 0;
            auto [p, ec] = std::from_chars(k_text.data(), k_text.data() + k_text.size(), k);
            if (ec != std::errc() || p != k_text.data() + k_text.size() || k < 1)
                return error_response(400, "k must be a positive integer");
            Json list = Json::array();
            for (const auto& s : suggest(query_or(query, "q", ""), static_cast<std::size_t>(k)))
                list.push_back({{"doc_path", s.doc_path}, {"chunk_id", s.chunk_id}, {"score", s.score}});
            return json_response(200, {{"suggestions", list}});
        }
        return error_response(404, "no route for " + std::string(path));
    } catch (const Error& e) {
        Json j = {{"error", e.what()}, {"code", std::string(to_string(e.code()))}};
        j["revision"] = revision();
        return json_response(400, j);
    } catch (const Json::exception& e) {
        return error_response(400, e.what());
    }
}

struct HttpServer::Impl {
    httplib::Server server;
};

HttpServer::HttpServer(Session& session) : impl_(std::make_unique<Impl>()) {
    auto dispatch = [&session](const httplib::Request& req, httplib::Response& res) {
        std::map<std::string, std::string> query;
        for (const auto& [k, v] : req.params)
            query.emplace(k, v);
        auto r = session.handle(req.method, req.path, query, req.body);
        res.status = r.status;
        res.set_content(r.body, r.content_type);
    };
    impl_->server.Get(".*", dispatch);
    impl_->server.Post(".*", dispatch);
    impl_->server.Put(".*", dispatch);
    impl_->server.Delete(".*", dispatch);
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0)
        return impl_->server.bind_to_any_port(host);
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

void HttpServer::run() { impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

bool serve_http(Session& session, const std::string& host, int port) {
    HttpServer server(session);
    if (server.bind(host, port) < 0)
        return false;
    server.run();
    return true;
}

std::string_view index_page() {
    return R"html(<!DOCTYPE html>
<html lang="en">
<head>
<meta charset="utf-8">
<title>litgrid</title>
<style>
body{font-family:sans-serif;margin:0;display:flex}
nav{width:15rem;padding:1rem;border-right:1px solid #ccc}
main{flex:1;padding:1rem 2rem}
table{border-collapse:collapse}td{border:1px solid #bbb;padding:.2rem .4rem;min-width:4rem}
td.t-e,.err{color:#b00}.fail{background:#fdd}.pass{background:#dfd}.stub{color:#850}
#banner{color:#b00}
</style>
</head>
<body>
<nav><select id="theme"></select><div id="toc"></div></nav>
<main><div id="banner"></div><div id="view"></div></main>
<script>
let revision = 0;
const $ = (id) => document.getElementById(id);
const esc = (s) => String(s).replace(/[&<>"]/g, (c) => ({'&':'&amp;','<':'&lt;','>':'&gt;','"':'&quot;'}[c]));
async function api(path, opts) {
  const r = await fetch(path, opts);
  const body = await r.json();
  if (!r.ok) throw new Error(body.error || r.status);
  return body;
}
function tocHtml(entries) {
  if (!entries.length) return '';
  return '<ul>' + entries.map((e) => `<li><a href="#${esc(e.id)}">${esc(e.title)}</a>${tocHtml(e.children)}</li>`).join('') + '</ul>';
}
function blockHtml(b) {
  switch (b.type) {
  case 'heading': return `<h${b.level + 1} id="${esc(b.id)}">${esc(b.title)}</h${b.level + 1}>`;
  case 'paragraph': return `<p id="${esc(b.id)}">` + b.runs.map((r) =>
      r.type === 'link' ? `<a href="#${esc(r.target)}">${esc(r.text)}</a>` :
      r.type === 'error' ? `<span class="err">${esc(r.text)}</span>` : esc(r.text)).join('') + '</p>';
  case 'table': return `<table id="${esc(b.id)}">` + b.rows.map((row, i) => '<tr>' + row.map((c, j) =>
      `<td class="t-${c.t}" data-grid="${esc(b.id)}" data-row="${i + 1}" data-col="${j + 1}" data-raw="${esc(c.raw)}">${esc(c.display)}</td>`).join('') + '</tr>').join('') + '</table>';
  case 'formula_display': return `<div id="${esc(b.id)}"><code>${esc(b.name)} = ${esc(b.expr)}</code> = <b>${esc(b.display)}</b></div>`;
  case 'assertion_badge': return `<div id="${esc(b.id)}" class="${b.pass ? 'pass' : 'fail'}">${b.pass ? 'pass' : 'fail'}: ${esc(b.msg)}</div>`;
  case 'image': return `<figure id="${esc(b.id)}"><img src="${esc(b.src)}" alt=""><figcaption>${esc(b.caption)}</figcaption></figure>`;
  case 'stub_notice': return `<p id="${esc(b.id)}" class="stub">${esc(b.text)}</p>`;
  }
  return '';
}
function colName(n) { let s = ''; while (n > 0) { const m = (n - 1) % 26; s = String.fromCharCode(65 + m) + s; n = Math.floor((n - 1) / 26); } return s; }
async function refresh() {
  const theme = $('theme').value || 'all';
  const doc = await api('/api/doc');
  revision = doc.revision;
  if (!$('theme').options.length) {
    $('theme').innerHTML = doc.themes.map((t) => `<option>${esc(t)}</option>`).join('');
  }
  $('toc').innerHTML = tocHtml(await api('/api/toc?theme=' + encodeURIComponent(theme)));
  const view = await api('/api/view?theme=' + encodeURIComponent(theme));
  $('view').innerHTML = view.blocks.map(blockHtml).join('\n');
}
$('theme').onchange = () => refresh().catch((e) => { $('banner').textContent = e.message; });
$('view').ondblclick = async (ev) => {
  const td = ev.target.closest('td[data-grid]');
  if (!td) return;
  const raw = prompt('Cell ' + colName(+td.dataset.col) + td.dataset.row, td.dataset.raw);
  if (raw === null) return;
  const edit = {op: 'set_cell', grid: td.dataset.grid, cell: colName(+td.dataset.col) + td.dataset.row, raw};
  try {
    await api('/api/edits', {method: 'POST', body: JSON.stringify({base_revision: revision, edits: [edit]})});
    $('banner').textContent = '';
  } catch (e) { $('banner').textContent = e.message; }
  await refresh();
};
refresh().catch((e) => { $('banner').textContent = e.message; });
</script>
</body>
</html>
)html";
}

} // namespace litgrid
