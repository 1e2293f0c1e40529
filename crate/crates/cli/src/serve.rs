//! `serve`: the protocol over websockets at `/ws`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::Response;
use axum::routing::get;
use axum::Router;
use clap::Args;
use futures_util::{SinkExt, StreamExt};
use gravlab_core::protocol::{ConnId, ServerCore, OUTBOX_LIMIT, SYNC_INTERVAL_MS};
use gravlab_core::session::{AssistMode, LogHeader, LogWriter, SessionConfig};
use tokio::sync::{mpsc, oneshot};

use crate::cmd::run::parse_mode;
use crate::{load_config, CliError};

pub const DEFAULT_PORT: u16 = 7454;

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    #[arg(long, default_value_t = DEFAULT_PORT)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub bind: String,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<AssistMode>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub participant: Option<String>,
    /// Event log path.
    #[arg(long, default_value = "session.jsonl")]
    pub out: PathBuf,
}

impl ServeArgs {
    pub fn session_config(&self) -> Result<SessionConfig, CliError> {
        let mut cfg = load_config(self.config.as_deref())?;
        if let Some(m) = self.mode {
            cfg.mode = m;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(p) = &self.participant {
            cfg.participant_id = p.clone();
        }
        cfg.validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }
}

/// Final words for a connection's writer task.
struct Kill {
    /// Deliver what is already queued before `last`.
    drain: bool,
    last: Vec<String>,
}

struct Link {
    tx: mpsc::Sender<String>,
    kill: Option<oneshot::Sender<Kill>>,
}

enum Cmd {
    Connect {
        tx: mpsc::Sender<String>,
        kill: oneshot::Sender<Kill>,
        reply: oneshot::Sender<ConnId>,
    },
    Line(ConnId, Vec<u8>),
    Gone(ConnId),
}

struct Hub {
    core: ServerCore,
    log: LogWriter<BufWriter<File>>,
    links: BTreeMap<ConnId, Link>,
    started: Instant,
}

impl Hub {
    fn now(&self) -> u64 {
        self.started.elapsed().as_millis() as u64
    }

    fn persist(&mut self) -> std::io::Result<()> {
        let records = self.core.take_records();
        self.log.append_all(&records)
    }

    fn flush(&mut self) {
        let now = self.now();
        for id in self.core.connections() {
            let Some(link) = self.links.get_mut(&id) else {
                continue;
            };
            let mut lines = self.core.take_outbox(id).into_iter();
            let mut overflow = false;
            for line in lines.by_ref() {
                if link.tx.try_send(line).is_err() {
                    overflow = true;
                    break;
                }
            }
            if overflow {
                self.core.backpressure(id, now);
                let last = self.core.take_outbox(id);
                if let Some(k) = link.kill.take() {
                    let _ = k.send(Kill { drain: false, last });
                }
                continue;
            }
            if !self.core.is_open(id) {
                if let Some(k) = link.kill.take() {
                    let _ = k.send(Kill {
                        drain: true,
                        last: Vec::new(),
                    });
                }
            }
        }
    }

    fn handle(&mut self, cmd: Cmd) {
        match cmd {
            Cmd::Connect { tx, kill, reply } => {
                let id = self.core.connect();
                self.links.insert(
                    id,
                    Link {
                        tx,
                        kill: Some(kill),
                    },
                );
                let _ = reply.send(id);
            }
            Cmd::Line(id, bytes) => {
                let now = self.now();
                self.core.receive(id, &bytes, now);
                self.core.tick(now);
            }
            Cmd::Gone(id) => {
                self.core.disconnect(id);
                self.links.remove(&id);
            }
        }
    }
}

async fn hub_loop(
    mut hub: Hub,
    mut rx: mpsc::Receiver<Cmd>,
    shutdown: oneshot::Receiver<()>,
) -> std::io::Result<()> {
    let mut ticker = tokio::time::interval(Duration::from_millis(SYNC_INTERVAL_MS));
    tokio::pin!(shutdown);
    loop {
        tokio::select! {
            _ = &mut shutdown => break,
            cmd = rx.recv() => match cmd {
                Some(cmd) => hub.handle(cmd),
                None => break,
            },
            _ = ticker.tick() => {
                let now = hub.now();
                hub.core.tick(now);
            }
        }
        hub.persist()?;
        hub.flush();
    }
    let now = hub.now();
    hub.core.shutdown("interrupted", now);
    hub.persist()?;
    hub.flush();
    Ok(())
}

async fn ws_handler(ws: WebSocketUpgrade, State(hub): State<mpsc::Sender<Cmd>>) -> Response {
    ws.on_upgrade(move |socket| connection(socket, hub))
}

async fn connection(socket: WebSocket, hub: mpsc::Sender<Cmd>) {
    let (tx, mut out_rx) = mpsc::channel::<String>(OUTBOX_LIMIT);
    let (kill_tx, mut kill_rx) = oneshot::channel::<Kill>();
    let (reply_tx, reply_rx) = oneshot::channel();
    let connect = Cmd::Connect {
        tx,
        kill: kill_tx,
        reply: reply_tx,
    };
    if hub.send(connect).await.is_err() {
        return;
    }
    let Ok(id) = reply_rx.await else { return };
    let (mut sink, mut stream) = socket.split();

    let writer = tokio::spawn(async move {
        loop {
            tokio::select! {
                biased;
                kill = &mut kill_rx => {
                    if let Ok(Kill { drain, last }) = kill {
                        if drain {
                            while let Ok(line) = out_rx.try_recv() {
                                if sink.send(Message::Text(line.into())).await.is_err() {
                                    return;
                                }
                            }
                        }
                        for line in last {
                            if sink.send(Message::Text(line.into())).await.is_err() {
                                return;
                            }
                        }
                    }
                    let _ = sink.send(Message::Close(None)).await;
                    return;
                }
                line = out_rx.recv() => match line {
                    Some(line) => {
                        if sink.send(Message::Text(line.into())).await.is_err() {
                            return;
                        }
                    }
                    None => return,
                },
            }
        }
    });

    while let Some(Ok(msg)) = stream.next().await {
        let bytes = match msg {
            Message::Text(t) => t.as_bytes().to_vec(),
            Message::Binary(b) => b.to_vec(),
            Message::Close(_) => break,
            _ => continue,
        };
        if hub.send(Cmd::Line(id, bytes)).await.is_err() {
            break;
        }
    }
    let _ = hub.send(Cmd::Gone(id)).await;
    let _ = writer.await;
}

/// Binds the listener; fails with exit code 2 when the port is taken.
pub async fn bind(args: &ServeArgs) -> Result<tokio::net::TcpListener, CliError> {
    let addr = format!("{}:{}", args.bind, args.port);
    tokio::net::TcpListener::bind(&addr)
        .await
        .map_err(|e| CliError::Usage(format!("cannot listen on {addr}: {e}")))
}

/// Serves until `stop` resolves, then closes the session and says BYE.
pub async fn serve(
    args: &ServeArgs,
    listener: tokio::net::TcpListener,
    stop: impl std::future::Future<Output = ()> + Send + 'static,
) -> Result<(), CliError> {
    let config = args.session_config()?;
    let core = ServerCore::new(config).map_err(|e| CliError::Config(e.to_string()))?;
    let header = LogHeader::for_config(core.session().config());
    let log = LogWriter::new(BufWriter::new(File::create(&args.out)?), &header)?;
    let hub = Hub {
        core,
        log,
        links: BTreeMap::new(),
        started: Instant::now(),
    };
    let (cmd_tx, cmd_rx) = mpsc::channel(1024);
    let (hub_stop_tx, hub_stop_rx) = oneshot::channel();
    let (http_stop_tx, http_stop_rx) = oneshot::channel::<()>();
    let hub_task = tokio::spawn(hub_loop(hub, cmd_rx, hub_stop_rx));

    let app = Router::new()
        .route("/ws", get(ws_handler))
        .with_state(cmd_tx);
    let addr: SocketAddr = listener.local_addr()?;
    tracing::info!("listening on ws://{addr}/ws");
    let server = tokio::spawn(async move {
        axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = http_stop_rx.await;
            })
            .await
    });

    stop.await;
    tracing::info!("shutting down");
    let _ = hub_stop_tx.send(());
    hub_task
        .await
        .map_err(|e| CliError::Io(std::io::Error::other(e)))??;
    // writers get a moment to deliver the BYEs
    tokio::time::sleep(Duration::from_millis(100)).await;
    let _ = http_stop_tx.send(());
    let _ = tokio::time::timeout(Duration::from_secs(2), server).await;
    Ok(())
}

/// Resolves on ctrl-c or SIGTERM.
pub async fn interrupted() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending::<()>().await,
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {}
        _ = term => {}
    }
}
