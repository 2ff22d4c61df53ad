pub mod bench;
pub mod gen;
pub mod oracle;
pub mod run;
pub mod trace;
pub mod verify;
