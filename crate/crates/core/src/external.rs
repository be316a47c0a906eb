//! Running external programs with captured output and a wall-clock limit.

use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExternalError {
    #[error("empty command")]
    EmptyCommand,
    #[error("cannot start '{program}': {source}")]
    Spawn {
        program: String,
        source: std::io::Error,
    },
    #[error("'{program}' timed out after {seconds:.1} s")]
    Timeout { program: String, seconds: f64 },
    #[error("'{program}' exited with status {status}: {stderr}")]
    Failed {
        program: String,
        status: String,
        stderr: String,
    },
    #[error("i/o with '{program}': {source}")]
    Io {
        program: String,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone)]
pub struct CapturedOutput {
    pub stdout: String,
    pub stderr: String,
}

/// Runs `argv`, feeding `input` on stdin, and returns the captured output
/// of a successful exit. The child is killed once `timeout` elapses.
pub fn run_captured(argv: &[String], input: Option<&[u8]>, timeout: Duration) -> Result<CapturedOutput, ExternalError> {
    let (program, args) = argv.split_first().ok_or(ExternalError::EmptyCommand)?;
    let io_err = |source| ExternalError::Io {
        program: program.clone(),
        source,
    };
    let mut child = Command::new(program)
        .args(args)
        .stdin(if input.is_some() { Stdio::piped() } else { Stdio::null() })
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|source| ExternalError::Spawn {
            program: program.clone(),
            source,
        })?;

    let writer = match (input, child.stdin.take()) {
        (Some(bytes), Some(mut stdin)) => {
            let bytes = bytes.to_vec();
            // a child that exits early closes the pipe; that is not our error
            Some(thread::spawn(move || {
                let _ = stdin.write_all(&bytes);
            }))
        }
        _ => None,
    };
    let drain = |pipe: Option<Box<dyn Read + Send>>| {
        thread::spawn(move || {
            let mut buf = Vec::new();
            if let Some(mut p) = pipe {
                let _ = p.read_to_end(&mut buf);
            }
            String::from_utf8_lossy(&buf).into_owned()
        })
    };
    let out = drain(child.stdout.take().map(|p| Box::new(p) as Box<dyn Read + Send>));
    let err = drain(child.stderr.take().map(|p| Box::new(p) as Box<dyn Read + Send>));

    let start = Instant::now();
    let status = loop {
        if let Some(s) = child.try_wait().map_err(io_err)? {
            break s;
        }
        if start.elapsed() >= timeout {
            let _ = child.kill();
            let _ = child.wait();
            return Err(ExternalError::Timeout {
                program: program.clone(),
                seconds: timeout.as_secs_f64(),
            });
        }
        thread::sleep(Duration::from_millis(10));
    };
    if let Some(w) = writer {
        let _ = w.join();
    }
    let stdout = out.join().unwrap_or_default();
    let stderr = err.join().unwrap_or_default();
    if !status.success() {
        return Err(ExternalError::Failed {
            program: program.clone(),
            status: status.to_string(),
            stderr,
        });
    }
    Ok(CapturedOutput { stdout, stderr })
}
