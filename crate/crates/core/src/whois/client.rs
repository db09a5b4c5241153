//! WHOIS wire client: TCP port 43, query line terminated CRLF, response
//! read to EOF. Per-server rate limiting and write-through caching.

use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};
use std::net::{TcpStream, ToSocketAddrs};
use std::sync::Mutex;
use std::time::Duration;

use chrono::NaiveDate;

use crate::error::{Result, ScanError};
use crate::rpsl::DomainName;

use super::cache::WhoisCache;
use super::WhoisResponse;

/// Injectable time source so rate limiting is testable with a virtual
/// clock.
pub trait Clock {
    fn now_millis(&self) -> u64;
    fn sleep(&self, duration: Duration);
}

pub struct SystemClock {
    start: std::time::Instant,
}

impl Default for SystemClock {
    fn default() -> Self {
        SystemClock {
            start: std::time::Instant::now(),
        }
    }
}

impl Clock for SystemClock {
    fn now_millis(&self) -> u64 {
        self.start.elapsed().as_millis() as u64
    }

    fn sleep(&self, duration: Duration) {
        std::thread::sleep(duration);
    }
}

/// Serializes queries per server so no server sees more than `max_qps`
/// queries per second.
pub struct RateLimiter {
    min_interval_ms: u64,
    last: Mutex<HashMap<String, u64>>,
}

impl RateLimiter {
    pub fn new(max_qps: f64) -> RateLimiter {
        let max_qps = if max_qps <= 0.0 { 0.5 } else { max_qps };
        RateLimiter {
            min_interval_ms: (1000.0 / max_qps).ceil() as u64,
            last: Mutex::new(HashMap::new()),
        }
    }

    /// Blocks (via the clock) until a query to `server` is permitted, and
    /// reserves that slot.
    pub fn acquire(&self, server: &str, clock: &dyn Clock) {
        let wait = {
            let mut last = self.last.lock().unwrap();
            let now = clock.now_millis();
            let earliest = last
                .get(server)
                .map(|t| t + self.min_interval_ms)
                .unwrap_or(now);
            let slot = earliest.max(now);
            last.insert(server.to_string(), slot);
            slot.saturating_sub(now)
        };
        if wait > 0 {
            clock.sleep(Duration::from_millis(wait));
        }
    }
}

/// Built-in TLD to WHOIS server table; config entries take precedence and
/// may use multi-label suffixes (e.g. "com.ua").
const BUILTIN_SERVERS: [(&str, &str); 18] = [
    ("com", "whois.verisign-grs.com"),
    ("net", "whois.verisign-grs.com"),
    ("org", "whois.pir.org"),
    ("info", "whois.afilias.net"),
    ("biz", "whois.biz"),
    ("ru", "whois.tcinet.ru"),
    ("su", "whois.tcinet.ru"),
    ("de", "whois.denic.de"),
    ("it", "whois.nic.it"),
    ("fr", "whois.nic.fr"),
    ("nl", "whois.domain-registry.nl"),
    ("uk", "whois.nic.uk"),
    ("ua", "whois.ua"),
    ("pl", "whois.dns.pl"),
    ("cz", "whois.nic.cz"),
    ("eu", "whois.eu"),
    ("se", "whois.iis.se"),
    ("ch", "whois.nic.ch"),
];

#[derive(Debug, Clone)]
pub struct WhoisClientConfig {
    /// Suffix -> server overrides, longest suffix wins.
    pub servers: BTreeMap<String, String>,
    pub max_qps: f64,
    pub offline: bool,
    pub timeout: Duration,
    pub max_retries: u32,
}

impl Default for WhoisClientConfig {
    fn default() -> Self {
        WhoisClientConfig {
            servers: BTreeMap::new(),
            // WHOIS servers rate-limit aggressively; default one query
            // per two seconds per server.
            max_qps: 0.5,
            offline: false,
            timeout: Duration::from_secs(10),
            max_retries: 5,
        }
    }
}

/// Resolves the WHOIS server for a domain by longest matching suffix.
pub fn resolve_server(domain: &DomainName, config: &WhoisClientConfig) -> Result<String> {
    let name = domain.as_str();
    let mut suffix = name;
    loop {
        if let Some(server) = config.servers.get(suffix) {
            return Ok(server.clone());
        }
        match suffix.split_once('.') {
            Some((_, rest)) => suffix = rest,
            None => break,
        }
    }
    let tld = domain.tld();
    BUILTIN_SERVERS
        .iter()
        .find(|(t, _)| *t == tld)
        .map(|(_, s)| s.to_string())
        .ok_or_else(|| ScanError::UnknownWhoisServer(tld.to_string()))
}

fn looks_rate_limited(body: &[u8]) -> bool {
    let text = String::from_utf8_lossy(body).to_ascii_lowercase();
    [
        "rate limit",
        "quota exceeded",
        "excessive quer",
        "try again later",
    ]
    .iter()
    .any(|m| text.contains(m))
}

/// Extracts a `Registrar WHOIS Server:` (or `refer:`) referral target.
fn find_referral(body: &[u8]) -> Option<String> {
    let text = String::from_utf8_lossy(body);
    for line in text.lines() {
        let lower = line.trim().to_ascii_lowercase();
        for label in ["registrar whois server:", "refer:", "whois:"] {
            if let Some(rest) = lower.strip_prefix(label) {
                let server = rest.trim();
                if !server.is_empty() {
                    return Some(server.to_string());
                }
            }
        }
    }
    None
}

fn exchange(server: &str, query: &str, timeout: Duration) -> std::io::Result<Vec<u8>> {
    let target = if server.contains(':') {
        server.to_string()
    } else {
        format!("{server}:43")
    };
    let addr = target
        .to_socket_addrs()?
        .next()
        .ok_or_else(|| std::io::Error::new(std::io::ErrorKind::NotFound, "no address"))?;
    let mut stream = TcpStream::connect_timeout(&addr, timeout)?;
    stream.set_read_timeout(Some(timeout))?;
    stream.set_write_timeout(Some(timeout))?;
    stream.write_all(format!("{query}\r\n").as_bytes())?;
    let mut body = Vec::new();
    let mut buf = [0u8; 4096];
    loop {
        match stream.read(&mut buf) {
            Ok(0) => break,
            Ok(n) => body.extend_from_slice(&buf[..n]),
            Err(e)
                if matches!(
                    e.kind(),
                    std::io::ErrorKind::WouldBlock | std::io::ErrorKind::TimedOut
                ) =>
            {
                // A server that never closes: accept what we have.
                if body.is_empty() {
                    return Err(e);
                }
                break;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(body)
}

fn query_once(server: &str, domain: &DomainName, config: &WhoisClientConfig) -> Result<Vec<u8>> {
    match exchange(server, domain.as_str(), config.timeout) {
        Ok(body) if looks_rate_limited(&body) => Err(ScanError::WhoisRateLimited {
            server: server.to_string(),
        }),
        Ok(body) => Ok(body),
        Err(e) => Err(ScanError::WhoisTransient {
            domain: domain.as_str().to_string(),
            retries: 0,
            detail: e.to_string(),
        }),
    }
}

fn query_with_retry(
    server: &str,
    domain: &DomainName,
    config: &WhoisClientConfig,
    limiter: &RateLimiter,
    clock: &dyn Clock,
) -> Result<Vec<u8>> {
    let mut backoff = Duration::from_millis(500);
    let mut attempt = 0;
    loop {
        limiter.acquire(server, clock);
        match query_once(server, domain, config) {
            Ok(body) => return Ok(body),
            Err(err) => {
                attempt += 1;
                if attempt > config.max_retries {
                    return Err(match err {
                        ScanError::WhoisTransient { domain, detail, .. } => {
                            ScanError::WhoisTransient {
                                domain,
                                retries: attempt - 1,
                                detail,
                            }
                        }
                        other => other,
                    });
                }
                clock.sleep(backoff);
                backoff *= 2;
            }
        }
    }
}

/// Queries WHOIS for a domain, following at most two referrals, and stores
/// the final response in the cache keyed by `(domain, query_date)`.
///
/// A same-day cache hit short-circuits without network I/O. Offline mode
/// answers only from cache (any date) and reports misses as transient
/// errors the pipeline maps to status Unknown.
pub fn query_whois(
    domain: &DomainName,
    query_date: NaiveDate,
    config: &WhoisClientConfig,
    cache: &mut WhoisCache,
    limiter: &RateLimiter,
    clock: &dyn Clock,
) -> Result<WhoisResponse> {
    if let Some(hit) = cache.lookup(domain, query_date)? {
        return Ok(WhoisResponse {
            server: hit.server,
            body: hit.body,
            referral: None,
        });
    }
    if config.offline {
        return match cache.lookup_latest(domain)? {
            Some(hit) => Ok(WhoisResponse {
                server: hit.server,
                body: hit.body,
                referral: None,
            }),
            None => Err(ScanError::WhoisTransient {
                domain: domain.as_str().to_string(),
                retries: 0,
                detail: "offline cache miss".to_string(),
            }),
        };
    }

    let mut server = resolve_server(domain, config)?;
    let mut body = query_with_retry(&server, domain, config, limiter, clock)?;
    let mut referral = None;
    for _ in 0..2 {
        match find_referral(&body) {
            Some(next) if next != server => {
                referral = Some(next.clone());
                server = next;
                body = query_with_retry(&server, domain, config, limiter, clock)?;
            }
            _ => break,
        }
    }

    cache.store(domain, query_date, &server, &body)?;
    Ok(WhoisResponse {
        server,
        body,
        referral,
    })
}
