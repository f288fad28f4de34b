package com.example.notes;

import android.app.Service;
import android.content.Intent;
import android.os.AsyncTask;
import android.os.IBinder;

import java.io.BufferedReader;
import java.io.IOException;
import java.io.InputStream;
import java.io.InputStreamReader;
import java.net.HttpURLConnection;
import java.net.URL;

public class SyncService extends Service {
    private static final String ENDPOINT = "https://notes.example.com/api/sync";

    @Override
    public int onStartCommand(Intent intent, int flags, int startId) {
        new SyncTask().execute(ENDPOINT);
        return START_NOT_STICKY;
    }

    @Override
    public IBinder onBind(Intent intent) {
        return null;
    }

    private static class SyncTask extends AsyncTask<String, Void, String> {
        @Override
        protected String doInBackground(String... urls) {
            StringBuilder text = new StringBuilder();
            try {
                HttpURLConnection connection = (HttpURLConnection) new URL(urls[0]).openConnection();
                InputStream stream = connection.getInputStream();
                BufferedReader reader = new BufferedReader(new InputStreamReader(stream));
                String line;
                while ((line = reader.readLine()) != null) {
                    text.append(line);
                }
                reader.close();
                stream.close();
            } catch (IOException e) {
                return null;
            }
            return text.toString();
        }
    }
}
