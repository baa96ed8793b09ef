//! Serves the session protocol over websockets. Each connection owns one
//! independent session.

use std::path::PathBuf;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::IntoResponse;
use axum::routing::get;
use axum::Router;

use super::protocol::{handle_message, MAX_MESSAGE_BYTES};
use super::session::Session;

/// Routes: `GET /` answers a plain banner, `GET /ws` upgrades to a session.
pub fn router(base_dir: PathBuf) -> Router {
    Router::new().route("/", get(|| async { "schematic session server; connect to /ws\n" })).route("/ws", get(upgrade)).with_state(base_dir)
}

async fn upgrade(ws: WebSocketUpgrade, State(base): State<PathBuf>) -> impl IntoResponse {
    ws.max_message_size(2 * MAX_MESSAGE_BYTES).on_upgrade(move |socket| run(socket, base))
}

async fn run(mut socket: WebSocket, base: PathBuf) {
    let mut session = Session::new(base);
    while let Some(Ok(msg)) = socket.recv().await {
        let reply = match msg {
            Message::Text(t) => handle_message(&mut session, &t),
            Message::Binary(b) => handle_message(&mut session, &String::from_utf8_lossy(&b)),
            Message::Close(_) => break,
            _ => continue,
        };
        if socket.send(Message::Text(reply)).await.is_err() {
            break;
        }
    }
}

/// Serves until the listener fails.
pub async fn serve(listener: tokio::net::TcpListener, base_dir: PathBuf) -> std::io::Result<()> {
    axum::serve(listener, router(base_dir)).await
}
