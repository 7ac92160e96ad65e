//! `convo-serve` — serve a conversation corpus over HTTP/JSON.

use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use convo_service::router;
use convo_store::CorpusStore;

#[derive(Parser)]
#[command(
    name = "convo-serve",
    version,
    about = "Serve conversation-corpus metrics over HTTP/JSON"
)]
struct Args {
    /// Corpus root directory (default: the CONVO_CORPUS environment variable)
    #[arg(long, value_name = "DIR")]
    corpus: Option<PathBuf>,

    /// Address to listen on
    #[arg(long, default_value = "127.0.0.1")]
    addr: String,

    /// Port to listen on
    #[arg(long, default_value_t = 8646)]
    port: u16,
}

#[tokio::main]
async fn main() -> ExitCode {
    let args = Args::parse();
    let root = match args
        .corpus
        .or_else(|| std::env::var_os("CONVO_CORPUS").map(PathBuf::from))
    {
        Some(root) => root,
        None => {
            eprintln!("error: no corpus root: pass --corpus DIR or set CONVO_CORPUS");
            return ExitCode::from(1);
        }
    };

    // Fail fast on a bad corpus rather than 500ing every request.
    if let Err(e) = CorpusStore::open(&root) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }

    let bind: SocketAddr = match format!("{}:{}", args.addr, args.port).parse() {
        Ok(addr) => addr,
        Err(e) => {
            eprintln!("error: bad listen address {}:{}: {e}", args.addr, args.port);
            return ExitCode::from(1);
        }
    };

    let listener = match tokio::net::TcpListener::bind(bind).await {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: cannot bind {bind}: {e}");
            return ExitCode::from(1);
        }
    };
    eprintln!("serving corpus {} on http://{bind}", root.display());

    let serve = axum::serve(listener, router(root)).with_graceful_shutdown(async {
        let _ = tokio::signal::ctrl_c().await;
    });
    if let Err(e) = serve.await {
        eprintln!("error: server failed: {e}");
        return ExitCode::from(1);
    }
    ExitCode::SUCCESS
}
