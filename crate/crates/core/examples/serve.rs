//! Runs the analysis service.
//!
//! `cargo run --example serve -- 127.0.0.1:8080`, then
//! `curl -s localhost:8080/health`.

use cauchy_constellations::server::{serve, ServerConfig, DEFAULT_BIND};

#[tokio::main]
async fn main() -> std::io::Result<()> {
    let bind = std::env::args().nth(1).unwrap_or_else(|| DEFAULT_BIND.to_string());
    println!("listening on {bind}");
    serve(&bind, ServerConfig::default()).await
}
