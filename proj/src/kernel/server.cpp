#include "cellguard/kernel/server.hpp"

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/post.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <nlohmann/json.hpp>

#include <sys/socket.h>

#include <atomic>
#include <condition_variable>
#include <deque>
#include <functional>
#include <list>
#include <map>
#include <thread>

namespace cellguard::kernel {

    namespace net = boost::asio;
    namespace beast = boost::beast;
    namespace http = beast::http;
    namespace websocket = beast::websocket;
    using tcp = net::ip::tcp;

    namespace {

        struct parsed_target {
            std::vector<std::string> segments;
            std::map<std::string, std::string> query;
        };

        parsed_target parse_target(std::string_view target) {
            parsed_target t;
            auto q = target.find('?');
            std::string_view path = target.substr(0, q);
            if (q != std::string_view::npos) {
                std::string_view rest = target.substr(q + 1);
                while (!rest.empty()) {
                    auto amp = rest.find('&');
                    std::string_view pair = rest.substr(0, amp);
                    auto eq = pair.find('=');
                    t.query[std::string(pair.substr(0, eq))] =
                            eq == std::string_view::npos ? "" : std::string(pair.substr(eq + 1));
                    rest = amp == std::string_view::npos ? std::string_view{} : rest.substr(amp + 1);
                }
            }
            while (!path.empty()) {
                auto slash = path.find('/');
                if (slash != 0) {
                    t.segments.emplace_back(path.substr(0, slash));
                }
                path = slash == std::string_view::npos ? std::string_view{} : path.substr(slash + 1);
            }
            return t;
        }

        http_reply json_reply(int status, const nlohmann::json& j) { return {status, j.dump()}; }

        http_reply method_not_allowed(std::string_view method) {
            return json_reply(405, {{"error", "method_not_allowed"},
                                    {"detail", std::string(method) + " is not supported here"}});
        }

        struct cell_body {
            std::string source;
            std::optional<std::size_t> position;
        };

        cell_body parse_cell_body(std::string_view body) {
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(body);
            }
            catch (const nlohmann::json::exception& e) {
                throw bad_request(std::string("invalid JSON: ") + e.what());
            }
            if (!j.is_object() || !j.contains("source") || !j["source"].is_string()) {
                throw bad_request("body must be an object with a string \"source\"");
            }
            cell_body out{j["source"].get<std::string>(), std::nullopt};
            if (j.contains("position") && !j["position"].is_null()) {
                if (!j["position"].is_number_unsigned()) {
                    throw bad_request("\"position\" must be a non-negative integer");
                }
                out.position = j["position"].get<std::size_t>();
            }
            return out;
        }

        bool parse_confirm(const std::map<std::string, std::string>& query) {
            auto it = query.find("confirm");
            if (it == query.end() || it->second == "false" || it->second == "0") {
                return false;
            }
            if (it->second == "true" || it->second == "1") {
                return true;
            }
            throw bad_request("confirm must be true or false");
        }

        nlohmann::json audit_json(const std::vector<safety_event>& events) {
            nlohmann::json out = nlohmann::json::array();
            for (const auto& e : events) {
                out.push_back({{"cell", e.cell}, {"counter", e.counter}, {"stale_symbols", e.symbols}});
            }
            return {{"events", out}};
        }

        // Unknown sessions fail before the body is examined.
        void require_session(const session_service& svc, const std::string& id) {
            if (!svc.has_session(id)) {
                throw not_found("unknown session '" + id + "'");
            }
        }

        http_reply route(session_service& svc, std::string_view method, const parsed_target& t, std::string_view body) {
            const auto& s = t.segments;
            if (s.empty() || s[0] != "sessions") {
                throw not_found("no route for this path");
            }
            if (s.size() == 1) {
                if (method != "POST") {
                    return method_not_allowed(method);
                }
                return json_reply(201, {{"session_id", svc.create_session()}});
            }
            const std::string& id = s[1];
            if (s.size() == 3 && s[2] == "highlights") {
                if (method != "GET") {
                    return method_not_allowed(method);
                }
                return {200, svc.get_highlights(id).to_json()};
            }
            if (s.size() == 3 && s[2] == "audit") {
                if (method != "GET") {
                    return method_not_allowed(method);
                }
                return json_reply(200, audit_json(svc.audit_log(id)));
            }
            if (s.size() == 3 && s[2] == "lineage") {
                if (method != "GET") {
                    return method_not_allowed(method);
                }
                return {200, svc.lineage_json(id)};
            }
            if (s.size() == 3 && s[2] == "cells") {
                if (method == "GET") {
                    return json_reply(200, {{"cells", svc.cell_ids(id)}});
                }
                if (method != "POST") {
                    return method_not_allowed(method);
                }
                require_session(svc, id);
                auto b = parse_cell_body(body);
                return json_reply(201, {{"cell_id", svc.upsert_cell(id, std::nullopt, b.source, b.position)}});
            }
            if (s.size() == 4 && s[2] == "cells") {
                if (method != "PUT") {
                    return method_not_allowed(method);
                }
                require_session(svc, id);
                auto b = parse_cell_body(body);
                return json_reply(200, {{"cell_id", svc.upsert_cell(id, s[3], b.source, b.position)}});
            }
            if (s.size() == 5 && s[2] == "cells" && s[4] == "run") {
                if (method != "POST") {
                    return method_not_allowed(method);
                }
                auto outcome = svc.run_cell(id, s[3], parse_confirm(t.query));
                if (outcome.rejected()) {
                    return {409, outcome.warning->to_json()};
                }
                return {200, outcome.to_json()};
            }
            throw not_found("no route for this path");
        }

    }  // namespace

    http_reply handle_request(session_service& service, std::string_view method, std::string_view target,
                              std::string_view body) {
        try {
            return route(service, method, parse_target(target), body);
        }
        catch (const kernel_error& e) {
            return {e.status(), e.to_json()};
        }
        catch (const std::exception& e) {
            return json_reply(500, {{"error", "internal"}, {"detail", e.what()}});
        }
    }

    struct http_server::impl {
        struct connection {
            net::io_context ioc;
            int fd{-1};
            std::thread worker;
            std::atomic<bool> done{false};
        };

        session_service& service;
        net::io_context ioc;
        tcp::acceptor acceptor;
        std::thread accept_thread;
        std::mutex mu;
        std::list<std::unique_ptr<connection>> connections;
        std::atomic<bool> stopping{false};
        std::mutex wait_mu;
        std::condition_variable stopped_cv;
        bool stopped{false};

        impl(session_service& svc, const std::string& address, unsigned short port)
            : service(svc), acceptor(ioc, {net::ip::make_address(address), port}) {}

        void accept_loop() {
            while (!stopping) {
                auto c = std::make_unique<connection>();
                beast::error_code ec;
                tcp::socket socket = acceptor.accept(c->ioc, ec);
                if (ec) {
                    if (stopping) {
                        return;
                    }
                    continue;
                }
                std::lock_guard lock(mu);
                reap();
                c->fd = socket.native_handle();
                auto* raw = c.get();
                c->worker = std::thread([this, raw, s = std::move(socket)]() mutable {
                    serve(*raw, std::move(s));
                    raw->done = true;
                });
                connections.push_back(std::move(c));
            }
        }

        void reap() {
            for (auto it = connections.begin(); it != connections.end();) {
                if ((*it)->done) {
                    (*it)->worker.join();
                    it = connections.erase(it);
                }
                else {
                    ++it;
                }
            }
        }

        void serve(connection& c, tcp::socket socket) {
            beast::flat_buffer buffer;
            beast::error_code ec;
            for (;;) {
                http::request<http::string_body> req;
                http::read(socket, buffer, req, ec);
                if (ec) {
                    break;
                }
                if (websocket::is_upgrade(req)) {
                    serve_websocket(c, std::move(socket), req);
                    return;
                }
                auto reply = handle_request(service, std::string_view(req.method_string().data(), req.method_string().size()),
                                            std::string_view(req.target().data(), req.target().size()), req.body());
                if (!write(socket, req, reply)) {
                    break;
                }
                if (!req.keep_alive()) {
                    break;
                }
            }
            socket.shutdown(tcp::socket::shutdown_send, ec);
        }

        static bool write(tcp::socket& socket, const http::request<http::string_body>& req, const http_reply& reply) {
            http::response<http::string_body> res{static_cast<http::status>(reply.status), req.version()};
            res.set(http::field::content_type, "application/json");
            res.keep_alive(req.keep_alive());
            res.body() = reply.body;
            res.prepare_payload();
            beast::error_code ec;
            http::write(socket, res, ec);
            return !ec;
        }

        void serve_websocket(connection& c, tcp::socket socket, const http::request<http::string_body>& req) {
            auto t = parse_target(std::string_view(req.target().data(), req.target().size()));
            const auto& s = t.segments;
            if (s.size() != 3 || s[0] != "sessions" || s[2] != "ws" || !service.has_session(s[1])) {
                write(socket, req, {404, not_found("no WebSocket endpoint here").to_json()});
                return;
            }
            websocket::stream<tcp::socket> ws(std::move(socket));
            beast::error_code ec;
            ws.accept(req, ec);
            if (ec) {
                return;
            }
            ws.text(true);

            std::deque<std::string> queue;
            bool writing = false;
            std::function<void()> write_next = [&] {
                writing = true;
                ws.async_write(net::buffer(queue.front()), [&](beast::error_code wec, std::size_t) {
                    queue.pop_front();
                    if (wec) {
                        return;
                    }
                    if (queue.empty()) {
                        writing = false;
                    }
                    else {
                        write_next();
                    }
                });
            };
            std::uint64_t token = 0;
            try {
                token = service.subscribe(s[1], [&](const std::string& payload) {
                    net::post(c.ioc, [&, payload] {
                        queue.push_back(payload);
                        if (!writing) {
                            write_next();
                        }
                    });
                });
            }
            catch (const kernel_error&) {
                return;
            }

            beast::flat_buffer incoming;
            std::function<void()> read_next = [&] {
                ws.async_read(incoming, [&](beast::error_code rec, std::size_t) {
                    if (rec) {
                        return;
                    }
                    incoming.consume(incoming.size());
                    read_next();
                });
            };
            read_next();
            c.ioc.run();
            try {
                service.unsubscribe(s[1], token);
            }
            catch (const kernel_error&) {
            }
        }
    };

    http_server::http_server(session_service& service, const std::string& address, unsigned short port)
        : impl_(std::make_unique<impl>(service, address, port)) {}

    http_server::~http_server() { stop(); }

    unsigned short http_server::port() const { return impl_->acceptor.local_endpoint().port(); }

    void http_server::start() {
        impl_->accept_thread = std::thread([this] { impl_->accept_loop(); });
    }

    void http_server::wait() {
        std::unique_lock lock(impl_->wait_mu);
        impl_->stopped_cv.wait(lock, [&] { return impl_->stopped; });
    }

    void http_server::stop() {
        if (impl_->stopping.exchange(true)) {
            return;
        }
        ::shutdown(impl_->acceptor.native_handle(), SHUT_RDWR);
        if (impl_->accept_thread.joinable()) {
            impl_->accept_thread.join();
        }
        std::list<std::unique_ptr<impl::connection>> open;
        {
            std::lock_guard lock(impl_->mu);
            open.swap(impl_->connections);
        }
        for (auto& c : open) {
            if (!c->done) {
                ::shutdown(c->fd, SHUT_RDWR);
            }
            c->worker.join();
        }
        {
            std::lock_guard lock(impl_->wait_mu);
            impl_->stopped = true;
        }
        impl_->stopped_cv.notify_all();
    }

}  // namespace cellguard::kernel
