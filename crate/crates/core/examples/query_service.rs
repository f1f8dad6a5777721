//! Serves a report with one pair per class and queries it over HTTP.
//!
//! With `--listen ADDR` the service keeps running on ADDR instead.

use std::io::{Read, Write};
use std::net::{SocketAddr, TcpStream};
use std::sync::Arc;

use chrono::NaiveDate;

use rovclass::classifier::NoopProbe;
use rovclass::pipeline::classify_routes;
use rovclass::report::{serve, serve_blocking, ClassificationReport, SharedStore};
use rovclass::scenarios::{compose, Unit};
use rovclass::{InvalidClass, RelGraph};

fn report() -> rovclass::Result<ClassificationReport> {
    let units: Vec<Unit> = InvalidClass::ALL
        .iter()
        .zip(0..)
        .map(|(&class, slot)| Unit { class, slot })
        .collect();
    let f = compose(&units);
    let graph = RelGraph::from_edges(&f.relationships);
    let c = classify_routes(&f.routes, f.roas, &graph, &Default::default(), &NoopProbe)?;
    Ok(ClassificationReport::new(
        NaiveDate::from_ymd_opt(2018, 5, 16),
        &c,
    ))
}

fn get(addr: SocketAddr, path: &str) -> std::io::Result<String> {
    let mut stream = TcpStream::connect(addr)?;
    write!(
        stream,
        "GET {path} HTTP/1.1\r\nHost: {addr}\r\nConnection: close\r\n\r\n"
    )?;
    let mut response = String::new();
    stream.read_to_string(&mut response)?;
    Ok(response)
}

fn main() -> rovclass::Result<()> {
    let store = Arc::new(SharedStore::new(report()?));
    let args: Vec<String> = std::env::args().collect();
    if let [_, flag, addr] = args.as_slice() {
        if flag == "--listen" {
            let addr = addr
                .parse()
                .map_err(|e| rovclass::Error::Config(format!("{addr}: {e}")))?;
            return serve_blocking(store, addr);
        }
    }

    let runtime = tokio::runtime::Runtime::new()?;
    let listener = runtime.block_on(tokio::net::TcpListener::bind("127.0.0.1:0"))?;
    let addr = listener.local_addr()?;
    runtime.spawn(serve(store, listener));
    for path in [
        "/v1/summary",
        "/v1/prefix/10.0.2.0/23",
        "/v1/prefix/192.0.2.0/24",
        "/v1/prefix/not-a-prefix",
        "/v1/class/transfer?per_page=5",
    ] {
        let response = get(addr, path)?;
        let status = response.lines().next().unwrap_or_default();
        let body = response.split_once("\r\n\r\n").map_or("", |(_, b)| b);
        println!(
            "GET {path}\n  {status}\n  {}\n",
            body.chars().take(300).collect::<String>()
        );
    }
    Ok(())
}
