#pragma once

#include "cellguard/kernel/service.hpp"

#include <memory>
#include <string>
#include <string_view>

namespace cellguard::kernel {

    struct http_reply {
        int status{200};
        std::string body;
    };

    // Routes one command to the service. Targets:
    //   POST /sessions
    //   POST /sessions/{id}/cells                  {"source", "position"?}
    //   PUT  /sessions/{id}/cells/{cell}           {"source", "position"?}
    //   POST /sessions/{id}/cells/{cell}/run?confirm=true|false
    //   GET  /sessions/{id}/highlights | cells | audit | lineage
    http_reply handle_request(session_service& service, std::string_view method, std::string_view target,
                              std::string_view body);

    // HTTP/JSON commands plus a WebSocket at /sessions/{id}/ws that pushes
    // every run of that session.
    class http_server {
      public:
        http_server(session_service& service, const std::string& address, unsigned short port);
        ~http_server();

        http_server(const http_server&) = delete;
        http_server& operator=(const http_server&) = delete;

        // Bound port, useful when constructed with port 0.
        unsigned short port() const;

        void start();
        // Blocks until stop() is called from another thread.
        void wait();
        void stop();

      private:
        struct impl;
        std::unique_ptr<impl> impl_;
    };

}  // namespace cellguard::kernel
